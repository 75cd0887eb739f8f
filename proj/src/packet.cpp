#include "resonance/packet.hpp"

#include "resonance/error.hpp"

#include <algorithm>
#include <cmath>

namespace resonance {

namespace {

FieldLayout full_layout(const OpenLatticeModel& model, int x_max)
{
    FieldLayout layout;
    layout.dots = true;
    layout.lead_extent.assign(model.n_leads(), x_max);
    return layout;
}

LatticeField unpack(const OpenLatticeModel& model, const FieldLayout& layout, const Eigen::VectorXcd& flat)
{
    const auto n = static_cast<Eigen::Index>(model.n_sites());
    LatticeField field;
    field.dot = flat.head(n);
    for (std::size_t a = 0; a < model.n_leads(); ++a)
        field.leads.push_back(flat.segment(layout.lead_offset(model.n_sites(), a), layout.lead_extent[a]));
    return field;
}

void check_x_max(const GaussianPacket& packet, int x_max)
{
    if (x_max < 1)
        fail(ErrorCode::InvalidInput, "x_max must be positive");
    if (!(packet.width > 0.0))
        fail(ErrorCode::InvalidInput, "packet width must be positive");
    if (packet.x0 + 6.0 * packet.width > x_max)
        fail(ErrorCode::InvalidInput, "packet is not supported within x_max");
}

}  // namespace

Eigen::VectorXcd GaussianPacket::profile(int x_max) const
{
    Eigen::VectorXcd values(x_max);
    for (int x = 1; x <= x_max; ++x) {
        const double u = (x - x0) / width;
        values(x - 1) = std::exp(-u * u) * std::polar(1.0, k0 * x);
    }
    return values / values.norm();
}

double LatticeField::norm_squared() const
{
    double sum = dot.squaredNorm();
    for (const auto& lead : leads)
        sum += lead.squaredNorm();
    return sum;
}

double LatticeField::max_abs_difference(const LatticeField& other) const
{
    double worst = dot.size() > 0 ? (dot - other.dot).cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t a = 0; a < leads.size(); ++a)
        if (leads[a].size() > 0)
            worst = std::max(worst, (leads[a] - other.leads[a]).cwiseAbs().maxCoeff());
    return worst;
}

std::vector<std::string> component_names(const SpectralSolution& solution)
{
    std::map<StateClass, int> counts;
    std::vector<std::string> names;
    for (const auto& state : solution.states) {
        const int rank = ++counts[state.state_class];
        std::string prefix;
        switch (state.state_class) {
        case StateClass::Bound: prefix = "bound"; break;
        case StateClass::AntiBound: prefix = "antibound"; break;
        case StateClass::Resonant: prefix = "res"; break;
        case StateClass::AntiResonant: prefix = "ar"; break;
        case StateClass::Exceptional: prefix = "exceptional"; break;
        }
        names.push_back(prefix + std::to_string(rank));
    }
    return names;
}

std::size_t packet_lead(const OpenLatticeModel& model, const GaussianPacket& packet)
{
    const auto lead = model.find_lead(packet.lead_label);
    if (!lead)
        fail(ErrorCode::BadLead, "no lead labelled '" + packet.lead_label + "'");
    return *lead;
}

std::vector<PacketFrame> packet_evolve(const OpenLatticeModel& model, const SpectralSolution& solution,
                                       const GaussianPacket& packet, const std::vector<double>& times, int x_max,
                                       const QuadratureOptions& options, bool with_components)
{
    check_x_max(packet, x_max);
    const FieldSource source = FieldSource::lead_profile(packet_lead(model, packet), packet.profile(x_max));
    const FieldLayout layout = full_layout(model, x_max);
    const auto names = component_names(solution);
    std::vector<PacketFrame> frames;
    for (const double t : times) {
        FieldResult result = propagate_field(model, solution, source, layout, t, options, with_components);
        PacketFrame frame;
        frame.time = t;
        frame.total = unpack(model, layout, result.total);
        if (with_components) {
            frame.components.emplace("free", unpack(model, layout, result.components[0]));
            for (std::size_t n = 0; n < names.size(); ++n)
                frame.components.emplace(names[n], unpack(model, layout, result.components[n + 1]));
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

LatticeField packet_component(const OpenLatticeModel& model, const SpectralSolution& solution, std::size_t n,
                              const GaussianPacket& packet, double time, int x_max,
                              const QuadratureOptions& options)
{
    if (n >= solution.states.size())
        fail(ErrorCode::InvalidInput, "state index out of range");
    check_x_max(packet, x_max);
    const FieldSource source = FieldSource::lead_profile(packet_lead(model, packet), packet.profile(x_max));
    const FieldLayout layout = full_layout(model, x_max);
    const FieldResult result = propagate_field(model, solution, source, layout, time, options, true);
    return unpack(model, layout, result.components[n + 1]);
}

std::vector<PacketFrame> packet_evolve_oracle(const ExactPropagator& propagator, const OpenLatticeModel& model,
                                              const GaussianPacket& packet, const std::vector<double>& times,
                                              int x_max)
{
    check_x_max(packet, x_max);
    const auto& system = propagator.system();
    if (x_max > system.lead_length())
        fail(ErrorCode::InvalidInput, "x_max exceeds the truncated lead length");
    const std::size_t lead = packet_lead(model, packet);
    const Eigen::VectorXcd profile = packet.profile(x_max);
    Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(system.dimension());
    initial.segment(system.row(SiteRef::lead(lead, 1)), x_max) = profile;

    std::vector<PacketFrame> frames;
    for (const double t : times) {
        check_horizon(propagator, t, x_max);
        const Eigen::VectorXcd state = propagator.evolve(initial, t);
        PacketFrame frame;
        frame.time = t;
        frame.total.dot = state.head(static_cast<Eigen::Index>(model.n_sites()));
        for (std::size_t a = 0; a < model.n_leads(); ++a)
            frame.total.leads.push_back(state.segment(system.row(SiteRef::lead(a, 1)), x_max));
        frames.push_back(std::move(frame));
    }
    return frames;
}

LatticeField time_invert(LatticeField field)
{
    field.dot = field.dot.conjugate();
    for (auto& lead : field.leads)
        lead = lead.conjugate();
    return field;
}

std::vector<ReabsorptionSeries> reabsorption_experiment(const OpenLatticeModel& model,
                                                        const SpectralSolution& solution, std::size_t lead,
                                                        std::size_t source, double t0, const std::vector<int>& xs,
                                                        const std::vector<double>& times,
                                                        const QuadratureOptions& options)
{
    if (!(t0 > 0.0))
        fail(ErrorCode::InvalidInput, "t0 must be positive");
    std::vector<double> shifted;
    std::vector<double> direct_pole_times;
    std::vector<double> inverted_pole_times;
    for (const double t : times) {
        shifted.push_back(t - t0);
        if (t != 0.0)
            direct_pole_times.push_back(t);
        if (t - t0 != 0.0)
            inverted_pole_times.push_back(t - t0);
    }
    std::vector<ReabsorptionSeries> out;
    for (const int x : xs) {
        ReabsorptionSeries series;
        series.x = x;
        series.direct = escaping_amplitude_x_quadrature(model, solution, lead, x, source, times, options);
        series.inverted = escaping_amplitude_x_quadrature(model, solution, lead, x, source, shifted, options);
        series.inverted.times = times;
        series.direct_poles = escaping_amplitude_x_poles(model, solution, lead, x, source, direct_pole_times);
        series.inverted_poles = escaping_amplitude_x_poles(model, solution, lead, x, source, inverted_pole_times);
        for (double& t : series.inverted_poles.times)
            t += t0;
        out.push_back(std::move(series));
    }
    return out;
}

double time_inversion_identity_error(const ExactPropagator& propagator, std::size_t lead, std::size_t source,
                                     double t0, const std::vector<int>& xs, const std::vector<double>& times)
{
    const auto& system = propagator.system();
    int farthest = 0;
    for (const int x : xs)
        farthest = std::max(farthest, x);
    check_horizon(propagator, t0, farthest);
    const Eigen::VectorXcd reflected = propagator.evolve_site(SiteRef::dot(source), t0).conjugate();
    double worst = 0.0;
    for (const double t : times) {
        check_horizon(propagator, t, farthest);
        check_horizon(propagator, t - t0, farthest);
        const Eigen::VectorXcd two_step = propagator.evolve(reflected, t);
        const Eigen::VectorXcd direct = propagator.evolve_site(SiteRef::dot(source), t - t0);
        for (const int x : xs) {
            const Eigen::Index r = system.row(SiteRef::lead(lead, x));
            worst = std::max(worst, std::abs(two_step(r) - direct(r)));
        }
    }
    return worst;
}

}  // namespace resonance
