#include "commands.hpp"

#include "output.hpp"

#include "resonance/error.hpp"
#include "resonance/grid.hpp"
#include "resonance/model_io.hpp"
#include "resonance/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <numbers>
#include <random>

namespace kit {

using namespace resonance;
using nlohmann::json;

namespace {

// Contiguous chunks, one task each; results come back in input order.
template <class F>
auto map_chunks(const std::vector<double>& items, int jobs, const F& fn)
{
    using Result = decltype(fn(items));
    const std::size_t parts = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                                      std::max<std::size_t>(items.size(), 1));
    std::vector<Result> results;
    if (parts == 1) {
        results.push_back(fn(items));
        return results;
    }
    std::vector<std::future<Result>> pending;
    for (std::size_t p = 0; p < parts; ++p) {
        const auto begin = items.begin() + static_cast<std::ptrdiff_t>(items.size() * p / parts);
        const auto end = items.begin() + static_cast<std::ptrdiff_t>(items.size() * (p + 1) / parts);
        pending.push_back(std::async(std::launch::async, fn, std::vector<double>(begin, end)));
    }
    for (auto& f : pending)
        results.push_back(f.get());
    return results;
}

AmplitudeSeries merge(std::vector<AmplitudeSeries> parts)
{
    AmplitudeSeries out = std::move(parts.front());
    for (std::size_t p = 1; p < parts.size(); ++p) {
        auto& part = parts[p];
        out.times.insert(out.times.end(), part.times.begin(), part.times.end());
        out.values.insert(out.values.end(), part.values.begin(), part.values.end());
        if (out.groups && part.groups)
            for (auto [dst, src] : {std::pair{&out.groups->res, &part.groups->res},
                                    std::pair{&out.groups->ar, &part.groups->ar},
                                    std::pair{&out.groups->bound_ab, &part.groups->bound_ab},
                                    std::pair{&out.groups->branch, &part.groups->branch},
                                    std::pair{&out.groups->plane, &part.groups->plane}})
                dst->insert(dst->end(), src->begin(), src->end());
        for (auto& w : part.warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
                out.warnings.push_back(w);
    }
    return out;
}

Method parse_method(const std::string& name)
{
    if (name == "quadrature")
        return Method::Quadrature;
    if (name == "poles")
        return Method::Poles;
    if (name == "oracle")
        return Method::Oracle;
    fail(ErrorCode::InvalidInput, "unknown method '" + name + "'");
}

std::size_t dot_index(const OpenLatticeModel& model, int one_based)
{
    if (one_based < 1 || static_cast<std::size_t>(one_based) > model.n_sites())
        fail(ErrorCode::BadSiteIndex, "dot index " + std::to_string(one_based) + " outside [1, " +
                                          std::to_string(model.n_sites()) + "]");
    return static_cast<std::size_t>(one_based - 1);
}

std::size_t lead_index(const OpenLatticeModel& model, const std::string& label)
{
    const auto lead = model.find_lead(label);
    if (!lead)
        fail(ErrorCode::BadLead, "no lead labelled '" + label + "'");
    return *lead;
}

void report_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

void emit_amplitudes(const GlobalOptions& g, const AmplitudeSeries& series, bool groups)
{
    report_warnings(series.warnings);
    OutputFile out(g.out);
    if (g.format == "json")
        out.stream() << amplitude_json(series, groups).dump(2) << '\n';
    else
        write_amplitude_csv(out.stream(), series, groups);
}

void check_groups_flag(bool groups, Method method)
{
    if (groups && method != Method::Poles)
        fail(ErrorCode::InvalidInput, "--groups is only available with --method poles");
}

QuadratureOptions quadrature_options(const GlobalOptions& g)
{
    QuadratureOptions options;
    options.abs_tol = g.tol;
    return options;
}

// Parses "2" (dot site) or "R:5" (lead R, site 5).
SiteRef parse_site(const OpenLatticeModel& model, const std::string& text, std::string& tag)
{
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            tag += text;
            return SiteRef::dot(dot_index(model, std::stoi(text)));
        }
        const std::string label = text.substr(0, colon);
        const int x = std::stoi(text.substr(colon + 1));
        if (x < 1)
            fail(ErrorCode::InvalidInput, "lead coordinate must be >= 1 in '" + text + "'");
        tag += label + std::to_string(x);
        return SiteRef::lead(lead_index(model, label), x);
    } catch (const std::logic_error&) {
        fail(ErrorCode::InvalidInput, "bad site '" + text + "'");
    }
}

struct Element {
    SiteRef a;
    SiteRef b;
    std::string tag;
};

Element parse_element(const OpenLatticeModel& model, const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        fail(ErrorCode::InvalidInput, "element '" + text + "' must be a,b");
    Element e;
    e.a = parse_site(model, text.substr(0, comma), e.tag);
    e.tag += "_";
    e.b = parse_site(model, text.substr(comma + 1), e.tag);
    return e;
}

std::vector<Complex> parse_lambdas(const std::string& text)
{
    std::vector<Complex> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        const auto colon = item.find(':');
        try {
            if (colon == std::string::npos)
                out.emplace_back(std::stod(item), 0.0);
            else
                out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::logic_error&) {
            fail(ErrorCode::InvalidInput, "bad lambda '" + item + "'; use re or re:im");
        }
        start = end + 1;
    }
    return out;
}

// ---- verify ----

struct CheckRow {
    std::string model;
    std::string check;
    std::string status;
    double value = 0.0;
    std::string detail;
};

std::vector<CheckRow> verify_model(const OpenLatticeModel& model, const std::string& name, double tol,
                                   std::uint64_t seed)
{
    std::vector<CheckRow> rows;
    const SpectralSolution solution = solve_discrete_states(model);
    const QuadraticPencil pencil(model);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto add = [&](std::string check, double value, std::string detail = {}) {
        rows.push_back({name, std::move(check), value <= tol ? "PASS" : "FAIL", value, std::move(detail)});
    };
    const auto skip = [&](std::string check) {
        rows.push_back({name, std::move(check), "SKIP", std::nan(""),
                        "IncompleteSpectrum: " + std::to_string(solution.n_infinite) +
                            " eigenvalue(s) at infinity (some Theta_ii = 1)"});
    };

    if (solution.complete())
        add("unity", verify_resolution_of_unity(solution).max_abs, "max |sum psi psi^T - I|");
    else
        skip("unity");

    add("biorthonormality", solution.diagnostics.max_biorthonormality_error, "max |Psi_m^T B Psi_n - delta|");

    double pencil_error = std::max(solution.diagnostics.max_pencil_residual, diagonal_relation_error(pencil, solution));
    const auto n = static_cast<Eigen::Index>(model.n_sites());
    for (int r = 0; r < 20; ++r) {
        const Complex lambda = std::polar(0.1 + 2.9 * unit(rng), 2.0 * std::numbers::pi * unit(rng));
        const Eigen::MatrixXcd pen = pencil.a().cast<Complex>() - lambda * pencil.b().cast<Complex>();
        Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
        target.topLeftCorner(n, n) = pencil.z(lambda);
        const double e1 = (pencil.x_factor(lambda) * pen * pencil.y1_factor(lambda) - target).cwiseAbs().maxCoeff();
        const double e2 = (pencil.y2_factor(lambda) * pen * pencil.x_factor(lambda) - target).cwiseAbs().maxCoeff();
        pencil_error = std::max({pencil_error, e1, e2});
    }
    add("pencil", pencil_error, "eigen-residual; diagonal relation; X/Y1/Y2 factorisation");

    if (solution.complete()) {
        double worst = 0.0;
        for (int r = 0; r < 20; ++r) {
            const double energy = -2.0 + 4.0 * (r + 0.5 + 0.4 * (unit(rng) - 0.5)) / 20.0;
            const SheetPoint retarded = retarded_point(energy);
            const SheetPoint advanced = SheetPoint::from_lambda(std::conj(retarded.lambda));
            const Eigen::MatrixXcd sum = g_eff_direct(model, retarded) + g_eff_direct(model, advanced);
            worst = std::max(worst, (g_retarded_advanced_sum(solution, energy) - sum).cwiseAbs().maxCoeff());
        }
        add("retarded_advanced", worst, "20 band energies");

        worst = 0.0;
        int done = 0;
        while (done < 50) {
            const Complex lambda = std::polar(0.1 + 2.9 * unit(rng), 2.0 * std::numbers::pi * unit(rng));
            bool close = false;
            for (const auto& s : solution.states)
                close = close || std::abs(lambda - s.lambda) < 1e-3;
            if (close)
                continue;
            const SheetPoint point = SheetPoint::from_lambda(lambda);
            worst = std::max(worst,
                             (g_eff_expanded(solution, point) - g_eff_direct(model, point)).cwiseAbs().maxCoeff());
            ++done;
        }
        add("expansion", worst, "50 random lambda");
    } else {
        skip("retarded_advanced");
        skip("expansion");
    }
    return rows;
}

}  // namespace

int run_spectrum(const GlobalOptions& g, const SpectrumArgs& args)
{
    const OpenLatticeModel model = load_model_file(args.model);
    SolveOptions options;
    options.allow_degenerate = args.allow_warnings;
    const SpectralSolution solution = solve_discrete_states(model, options);
    report_warnings(solution.diagnostics.warnings);
    OutputFile out(g.out);
    if (g.format == "json")
        out.stream() << spectrum_json(model, solution).dump(2) << '\n';
    else
        write_spectrum_csv(out.stream(), model, solution);
    return 0;
}

int run_verify(const GlobalOptions& g, const VerifyArgs& args)
{
    std::vector<CheckRow> rows;
    int models = 0;
    int passed = 0;
    const auto tally = [&](const std::vector<CheckRow>& model_rows) {
        ++models;
        if (std::none_of(model_rows.begin(), model_rows.end(), [](const CheckRow& r) { return r.status == "FAIL"; }))
            ++passed;
        rows.insert(rows.end(), model_rows.begin(), model_rows.end());
    };

    if (args.random > 0) {
        if (args.n_sites < 0 || args.n_sites > 12)
            fail(ErrorCode::InvalidInput, "--n must lie in [1, 12] (0 draws 1..6)");
        // Draw all models first so the set is independent of --jobs.
        std::mt19937_64 rng(args.seed);
        std::vector<std::pair<OpenLatticeModel, std::uint64_t>> drawn;
        int skipped = 0;
        while (static_cast<int>(drawn.size()) < args.random) {
            OpenLatticeModel model = random_model(rng, static_cast<std::size_t>(args.n_sites));
            const std::uint64_t check_seed = rng();
            try {
                solve_discrete_states(model);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateSpectrum)
                    throw;
                ++skipped;
                continue;
            }
            drawn.emplace_back(std::move(model), check_seed);
        }
        std::vector<double> indices(drawn.size());
        for (std::size_t m = 0; m < indices.size(); ++m)
            indices[m] = static_cast<double>(m);
        const auto chunks = map_chunks(indices, g.jobs, [&](const std::vector<double>& part) {
            std::vector<std::vector<CheckRow>> out;
            for (const double m : part) {
                const auto idx = static_cast<std::size_t>(m);
                out.push_back(verify_model(drawn[idx].first, "random" + std::to_string(idx + 1), g.tol,
                                           drawn[idx].second));
            }
            return out;
        });
        for (const auto& chunk : chunks)
            for (const auto& model_rows : chunk)
                tally(model_rows);
        if (skipped > 0)
            std::cerr << "note: skipped " << skipped << " degenerate draw(s)\n";
    }
    if (!args.model.empty())
        tally(verify_model(load_model_file(args.model), args.model, g.tol, args.seed));
    if (models == 0)
        fail(ErrorCode::InvalidInput, "give a model file or --random N");

    const std::string summary = std::to_string(passed) + "/" + std::to_string(models) + " PASS";
    OutputFile out(g.out);
    if (g.format == "json") {
        json checks = json::array();
        for (const auto& r : rows)
            checks.push_back({{"model", r.model},
                              {"check", r.check},
                              {"status", r.status},
                              {"value", std::isnan(r.value) ? json(nullptr) : json(r.value)},
                              {"tolerance", g.tol},
                              {"detail", r.detail}});
        out.stream() << json{{"checks", checks}, {"passed", passed}, {"models", models}, {"summary", summary}}.dump(2)
                     << '\n';
    } else {
        out.stream() << "model,check,status,value,tolerance,detail\n";
        for (const auto& r : rows)
            out.stream() << r.model << ',' << r.check << ',' << r.status << ',' << num(r.value) << ',' << num(g.tol)
                         << ',' << r.detail << '\n';
        out.stream() << "summary,all," << (passed == models ? "PASS" : "FAIL") << ',' << passed << ','
                     << num(g.tol) << ',' << summary << '\n';
    }
    std::cerr << summary << '\n';
    return passed == models ? 0 : 1;
}

int run_greens(const GlobalOptions& g, const GreensArgs& args)
{
    const OpenLatticeModel model = load_model_file(args.model);
    OutputFile out(g.out);

    if (!args.transmission.empty()) {
        const auto comma = args.transmission.find(',');
        if (comma == std::string::npos)
            fail(ErrorCode::InvalidInput, "--transmission wants IN,OUT lead labels");
        const std::size_t in = lead_index(model, args.transmission.substr(0, comma));
        const std::size_t to = lead_index(model, args.transmission.substr(comma + 1));
        if (args.energies.empty())
            fail(ErrorCode::InvalidInput, "--transmission needs --E");
        const auto energies = parse_grid(args.energies);
        const auto rows = map_chunks(energies, g.jobs, [&](const std::vector<double>& part) {
            std::vector<std::array<double, 3>> r;
            for (const double e : part) {
                // No propagating channel outside the open band.
                if (std::abs(e) >= 2.0)
                    r.push_back({e, e >= 2.0 ? std::numbers::pi : 0.0, 0.0});
                else
                    r.push_back({e, std::acos(-0.5 * e), transmission(model, e, in, to)});
            }
            return r;
        });
        if (g.format == "json") {
            json doc = json::array();
            for (const auto& chunk : rows)
                for (const auto& r : chunk)
                    doc.push_back({{"E", r[0]}, {"k", r[1]}, {"T", r[2]}});
            out.stream() << doc.dump(2) << '\n';
        } else {
            out.stream() << "E,k,T\n";
            for (const auto& chunk : rows)
                for (const auto& r : chunk)
                    out.stream() << num(r[0]) << ',' << num(r[1]) << ',' << num(r[2]) << '\n';
        }
        return 0;
    }

    if (args.elements.empty())
        fail(ErrorCode::InvalidInput, "give at least one --element");
    std::vector<Element> elements;
    for (const auto& text : args.elements)
        elements.push_back(parse_element(model, text));
    if (args.energies.empty() == args.lambdas.empty())
        fail(ErrorCode::InvalidInput, "give exactly one of --E and --lambda");

    std::vector<SheetPoint> points;
    if (!args.energies.empty()) {
        for (const double e : parse_grid(args.energies))
            points.push_back(std::abs(e) < 2.0 ? retarded_point(e) : lambda_from_energy(e, Sheet::First));
    } else {
        for (const Complex l : parse_lambdas(args.lambdas)) {
            if (l == Complex(0.0))
                fail(ErrorCode::ZeroLambda, "lambda = 0 is not a valid sheet point");
            points.push_back(SheetPoint::from_lambda(l));
        }
    }

    const SpectralSolution solution = solve_discrete_states(model);
    report_warnings(solution.diagnostics.warnings);
    std::vector<double> indices(points.size());
    for (std::size_t m = 0; m < points.size(); ++m)
        indices[m] = static_cast<double>(m);
    // value, |expansion - direct| per element
    const auto chunks = map_chunks(indices, g.jobs, [&](const std::vector<double>& part) {
        std::vector<std::vector<std::pair<Complex, double>>> r;
        for (const double m : part) {
            const SheetPoint& p = points[static_cast<std::size_t>(m)];
            std::vector<std::pair<Complex, double>> row;
            for (const auto& e : elements) {
                const Complex direct = full_green_element_direct(model, p, e.a, e.b, LeadBoundary::Allow);
                if (solution.complete()) {
                    const Complex expanded = full_green_element(model, solution, p, e.a, e.b, LeadBoundary::Allow);
                    row.emplace_back(expanded, std::abs(expanded - direct));
                } else {
                    row.emplace_back(direct, std::nan(""));
                }
            }
            r.push_back(std::move(row));
        }
        return r;
    });

    if (g.format == "json") {
        json doc = json::array();
        std::size_t m = 0;
        for (const auto& chunk : chunks)
            for (const auto& row : chunk) {
                const SheetPoint& p = points[m++];
                json entry = {{"lambda", complex_json(p.lambda)}, {"E", complex_json(p.energy)}};
                for (std::size_t c = 0; c < elements.size(); ++c)
                    entry["G_" + elements[c].tag] = {
                        {"value", complex_json(row[c].first)},
                        {"diff", std::isnan(row[c].second) ? json(nullptr) : json(row[c].second)}};
                doc.push_back(entry);
            }
        out.stream() << doc.dump(2) << '\n';
        return 0;
    }
    const bool by_energy = !args.energies.empty();
    out.stream() << (by_energy ? "E" : "re_lambda,im_lambda,re_E,im_E");
    for (const auto& e : elements)
        out.stream() << ",re_G_" << e.tag << ",im_G_" << e.tag << ",diff_" << e.tag;
    if (by_energy)
        out.stream() << ",re_lambda,im_lambda";
    out.stream() << '\n';
    std::size_t m = 0;
    for (const auto& chunk : chunks)
        for (const auto& row : chunk) {
            const SheetPoint& p = points[m++];
            if (by_energy)
                out.stream() << num(p.energy.real());
            else
                out.stream() << num(p.lambda.real()) << ',' << num(p.lambda.imag()) << ',' << num(p.energy.real())
                             << ',' << num(p.energy.imag());
            for (const auto& [value, diff] : row)
                out.stream() << ',' << num(value.real()) << ',' << num(value.imag()) << ',' << num(diff);
            if (by_energy)
                out.stream() << ',' << num(p.lambda.real()) << ',' << num(p.lambda.imag());
            out.stream() << '\n';
        }
    return 0;
}

int run_survival(const GlobalOptions& g, const SurvivalArgs& args)
{
    const OpenLatticeModel model = load_model_file(args.model);
    const std::size_t i = dot_index(model, args.i);
    const std::size_t j = dot_index(model, args.j);
    const Method method = parse_method(args.method);
    check_groups_flag(args.groups, method);
    const auto times = parse_grid(args.times);

    AmplitudeSeries series;
    if (method == Method::Oracle) {
        const ExactPropagator propagator(truncate(model, args.lead_length));
        series = merge(map_chunks(times, g.jobs, [&](const std::vector<double>& part) {
            return survival_amplitude_oracle(propagator, i, j, part);
        }));
    } else {
        const SpectralSolution solution = solve_discrete_states(model);
        report_warnings(solution.diagnostics.warnings);
        const QuadratureOptions options = quadrature_options(g);
        series = merge(map_chunks(times, g.jobs, [&](const std::vector<double>& part) {
            return method == Method::Poles ? survival_amplitude_poles(solution, i, j, part)
                                           : survival_amplitude_quadrature(model, solution, i, j, part, options);
        }));
    }
    emit_amplitudes(g, series, args.groups);
    return 0;
}

int run_escape(const GlobalOptions& g, const EscapeArgs& args)
{
    const OpenLatticeModel model = load_model_file(args.model);
    const std::size_t lead = lead_index(model, args.lead);
    const std::size_t i = dot_index(model, args.i);
    const Method method = parse_method(args.method);
    check_groups_flag(args.groups, method);
    if (args.x.has_value() == args.k.has_value())
        fail(ErrorCode::InvalidInput, "give exactly one of --x and --k");
    const auto times = parse_grid(args.times);
    const SpectralSolution solution = solve_discrete_states(model);
    report_warnings(solution.diagnostics.warnings);
    const QuadratureOptions options = quadrature_options(g);

    std::optional<ExactPropagator> propagator;
    if (method == Method::Oracle)
        propagator.emplace(truncate(model, args.lead_length));

    const auto series = merge(map_chunks(times, g.jobs, [&](const std::vector<double>& part) {
        if (args.x) {
            const int x = *args.x;
            switch (method) {
            case Method::Quadrature: return escaping_amplitude_x_quadrature(model, solution, lead, x, i, part, options);
            case Method::Poles: return escaping_amplitude_x_poles(model, solution, lead, x, i, part);
            case Method::Oracle: return escaping_amplitude_x_oracle(*propagator, lead, x, i, part);
            }
        }
        const double k = *args.k;
        switch (method) {
        case Method::Quadrature: return escaping_amplitude_k_quadrature(model, solution, lead, k, i, part, options);
        case Method::Poles: return escaping_amplitude_k_poles(model, solution, lead, k, i, part);
        case Method::Oracle: break;
        }
        return escaping_amplitude_k_oracle(*propagator, solution, lead, k, i, part);
    }));
    emit_amplitudes(g, series, args.groups);
    return 0;
}

int run_packet(const GlobalOptions& g, const PacketArgs& args)
{
    const OpenLatticeModel model = load_model_file(args.model);
    const Method method = parse_method(args.method);
    if (method == Method::Poles)
        fail(ErrorCode::InvalidInput, "packet supports --method quadrature or oracle");
    if (args.components && method != Method::Quadrature)
        fail(ErrorCode::InvalidInput, "--components needs --method quadrature");
    GaussianPacket packet;
    packet.lead_label = args.lead;
    packet.x0 = args.x0;
    packet.width = args.width;
    packet.k0 = args.k0;
    packet_lead(model, packet);
    const auto times = parse_grid(args.times);

    std::vector<std::string> order{"total"};
    std::vector<PacketFrame> frames;
    if (method == Method::Oracle) {
        const ExactPropagator propagator(truncate(model, args.lead_length));
        for (auto& part : map_chunks(times, g.jobs, [&](const std::vector<double>& p) {
                 return packet_evolve_oracle(propagator, model, packet, p, args.x_max);
             }))
            frames.insert(frames.end(), part.begin(), part.end());
    } else {
        const SpectralSolution solution = solve_discrete_states(model);
        report_warnings(solution.diagnostics.warnings);
        const QuadratureOptions options = quadrature_options(g);
        for (auto& part : map_chunks(times, g.jobs, [&](const std::vector<double>& p) {
                 return packet_evolve(model, solution, packet, p, args.x_max, options, args.components);
             }))
            frames.insert(frames.end(), part.begin(), part.end());
        if (args.components) {
            order.push_back("free");
            for (const auto& name : component_names(solution))
                order.push_back(name);
        }
    }
    OutputFile out(g.out);
    if (g.format == "json")
        out.stream() << packet_json(model, frames, order).dump(2) << '\n';
    else
        write_packet_csv(out.stream(), model, frames, order);
    return 0;
}

}  // namespace kit
