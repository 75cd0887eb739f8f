#include "output.hpp"

#include "resonance/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <iostream>

namespace kit {

using nlohmann::json;
using namespace resonance;

std::string num(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0.0)
        return "0";
    return fmt::format("{:.17g}", value);
}

OutputFile::OutputFile(const std::string& path) : console_(&std::cout)
{
    if (!path.empty() && path != "-") {
        file_.open(path);
        if (!file_)
            fail(ErrorCode::InvalidInput, "cannot write " + path);
    }
}

json complex_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

double norm_residual(const DiscreteState& state, const Eigen::VectorXd& theta)
{
    const Complex l2 = state.lambda * state.lambda;
    const Complex plain = state.psi.transpose() * state.psi;
    const Complex weighted = state.psi.transpose() * theta.cast<Complex>().asDiagonal() * state.psi;
    return std::abs((1.0 - l2) * plain + l2 * weighted - 1.0);
}

void write_spectrum_csv(std::ostream& out, const OpenLatticeModel&, const SpectralSolution& solution)
{
    out << "n,re_lambda,im_lambda,re_E,im_E,class,norm_residual\n";
    for (std::size_t n = 0; n < solution.states.size(); ++n) {
        const auto& s = solution.states[n];
        out << n + 1 << ',' << num(s.lambda.real()) << ',' << num(s.lambda.imag()) << ',' << num(s.energy.real())
            << ',' << num(s.energy.imag()) << ',' << to_string(s.state_class) << ','
            << num(norm_residual(s, solution.theta)) << '\n';
    }
}

json spectrum_json(const OpenLatticeModel& model, const SpectralSolution& solution)
{
    json states = json::array();
    for (std::size_t n = 0; n < solution.states.size(); ++n) {
        const auto& s = solution.states[n];
        json psi = json::array();
        for (Eigen::Index i = 0; i < s.psi.size(); ++i)
            psi.push_back(complex_json(s.psi(i)));
        states.push_back({{"n", n + 1},
                          {"lambda", complex_json(s.lambda)},
                          {"k", complex_json(s.k)},
                          {"energy", complex_json(s.energy)},
                          {"class", std::string(to_string(s.state_class))},
                          {"partner", s.partner_index + 1},
                          {"psi", psi},
                          {"norm_residual", norm_residual(s, solution.theta)}});
    }
    const auto& d = solution.diagnostics;
    const json gap = std::isfinite(d.min_relative_gap) ? json(d.min_relative_gap) : json(nullptr);
    return {{"n_sites", model.n_sites()},
            {"n_infinite", solution.n_infinite},
            {"states", states},
            {"diagnostics",
             {{"max_pencil_residual", d.max_pencil_residual},
              {"max_relative_z_residual", d.max_relative_z_residual},
              {"max_biorthonormality_error", d.max_biorthonormality_error},
              {"min_relative_gap", gap},
              {"warnings", d.warnings}}}};
}

void write_amplitude_csv(std::ostream& out, const AmplitudeSeries& series, bool groups)
{
    out << "t,re,im,abs2,method,group\n";
    const auto method = to_string(series.method);
    const auto row = [&](double t, Complex v, std::string_view group) {
        out << num(t) << ',' << num(v.real()) << ',' << num(v.imag()) << ',' << num(std::norm(v)) << ',' << method
            << ',' << group << '\n';
    };
    for (std::size_t m = 0; m < series.times.size(); ++m) {
        row(series.times[m], series.values[m], "total");
        if (groups && series.groups)
            for (const auto name : TermGroups::names)
                row(series.times[m], series.groups->by_name(name)[m], name);
    }
}

json amplitude_json(const AmplitudeSeries& series, bool groups)
{
    json values = json::array();
    for (const auto& v : series.values)
        values.push_back(complex_json(v));
    json doc = {{"method", std::string(to_string(series.method))},
                {"times", series.times},
                {"values", values},
                {"warnings", series.warnings}};
    if (groups && series.groups) {
        json g = json::object();
        for (const auto name : TermGroups::names) {
            json column = json::array();
            for (const auto& v : series.groups->by_name(name))
                column.push_back(complex_json(v));
            g[std::string(name)] = column;
        }
        doc["groups"] = g;
    }
    return doc;
}

namespace {

const LatticeField* find_component(const PacketFrame& frame, const std::string& name)
{
    if (name == "total")
        return &frame.total;
    const auto it = frame.components.find(name);
    return it == frame.components.end() ? nullptr : &it->second;
}

}  // namespace

void write_packet_csv(std::ostream& out, const OpenLatticeModel& model, const std::vector<PacketFrame>& frames,
                      const std::vector<std::string>& order)
{
    out << "t,lead,x,re,im,abs2,component\n";
    for (const auto& frame : frames) {
        const std::string t = num(frame.time);
        for (const auto& name : order) {
            const LatticeField* field = find_component(frame, name);
            if (!field)
                continue;
            const auto row = [&](std::string_view lead, long x, Complex v) {
                out << t << ',' << lead << ',' << x << ',' << num(v.real()) << ',' << num(v.imag()) << ','
                    << num(std::norm(v)) << ',' << name << '\n';
            };
            for (Eigen::Index i = 0; i < field->dot.size(); ++i)
                row("dot", static_cast<long>(i + 1), field->dot(i));
            for (std::size_t a = 0; a < field->leads.size(); ++a)
                for (Eigen::Index x = 0; x < field->leads[a].size(); ++x)
                    row(model.lead(a).label, static_cast<long>(x + 1), field->leads[a](x));
        }
    }
}

json packet_json(const OpenLatticeModel& model, const std::vector<PacketFrame>& frames,
                 const std::vector<std::string>& order)
{
    const auto field_json = [&](const LatticeField& field) {
        json dot = json::array();
        for (Eigen::Index i = 0; i < field.dot.size(); ++i)
            dot.push_back(complex_json(field.dot(i)));
        json leads = json::object();
        for (std::size_t a = 0; a < field.leads.size(); ++a) {
            json values = json::array();
            for (Eigen::Index x = 0; x < field.leads[a].size(); ++x)
                values.push_back(complex_json(field.leads[a](x)));
            leads[model.lead(a).label] = values;
        }
        return json{{"dot", dot}, {"leads", leads}};
    };
    json out = json::array();
    for (const auto& frame : frames) {
        json entry = {{"t", frame.time}};
        json components = json::object();
        for (const auto& name : order)
            if (const LatticeField* field = find_component(frame, name))
                components[name] = field_json(*field);
        entry["fields"] = components;
        out.push_back(entry);
    }
    return {{"frames", out}};
}

}  // namespace kit
