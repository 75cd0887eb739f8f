#include "resonance/time_evolution.hpp"

#include "resonance/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace resonance {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_times_nonzero(const std::vector<double>& times)
{
    for (const double t : times)
        if (t == 0.0)
            fail(ErrorCode::InvalidInput, "the long-time pole expansion is undefined at t = 0");
}

// Factors a residue term picks up at time t: resonant poles for t > 0, anti-resonant for t < 0,
// bound poles always, anti-bound never.
std::vector<Complex>* residue_group(TermGroups& g, StateClass c, double t)
{
    switch (c) {
    case StateClass::Resonant: return t > 0.0 ? &g.res : nullptr;
    case StateClass::AntiResonant: return t < 0.0 ? &g.ar : nullptr;
    case StateClass::Bound: return &g.bound_ab;
    default: return nullptr;
    }
}

// Saddle contribution of the band edge E = 2 sigma, without the state-dependent part.
Complex branch_prefactor(double t, int sigma)
{
    const double s = static_cast<double>(sigma);
    const Complex edge = std::polar(1.0, 2.0 * s * t);
    const double root_pi = std::sqrt(std::numbers::pi);
    if (t > 0.0)
        return std::pow(t, -1.5) * edge * root_pi * std::polar(1.0, 3.0 * s * std::numbers::pi / 4.0) /
               (2.0 * std::numbers::pi * kI);
    return -std::pow(-t, -1.5) * edge * root_pi * std::polar(1.0, -3.0 * s * std::numbers::pi / 4.0) /
           (2.0 * std::numbers::pi * kI);
}

TermGroups empty_groups(std::size_t n)
{
    TermGroups g;
    for (auto* v : {&g.res, &g.ar, &g.bound_ab, &g.branch, &g.plane})
        v->assign(n, Complex(0.0));
    return g;
}

void finish_series(AmplitudeSeries& series, const SpectralSolution& solution)
{
    const auto& g = *series.groups;
    series.values.resize(series.times.size());
    for (std::size_t m = 0; m < series.times.size(); ++m) {
        series.values[m] = g.res[m] + g.ar[m] + g.bound_ab[m] + g.branch[m] + g.plane[m];
        if (auto w = saddle_overlap_warning(solution, series.times[m]);
            w && std::find(series.warnings.begin(), series.warnings.end(), *w) == series.warnings.end())
            series.warnings.push_back(*w);
    }
    for (const auto& state : solution.states)
        if (state.state_class == StateClass::Exceptional) {
            series.warnings.push_back("exceptional state omitted from the pole groups");
            break;
        }
}

// Pole groups for <sink|e^{-iHt}|d_i>, where the sink couples through dot site j with
// factor pole_factor(lambda_n) at the poles and edge_factor(sigma) at the band edges.
template <class PoleFactor, class EdgeFactor>
AmplitudeSeries pole_series(const SpectralSolution& solution, std::size_t i, std::size_t j,
                            const std::vector<double>& times, const PoleFactor& pole_factor,
                            const EdgeFactor& edge_factor)
{
    if (i >= solution.n_sites() || j >= solution.n_sites())
        fail(ErrorCode::BadSiteIndex, "dot index out of range");
    check_times_nonzero(times);
    AmplitudeSeries series;
    series.times = times;
    series.method = Method::Poles;
    series.groups = empty_groups(times.size());
    auto& g = *series.groups;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t m = 0; m < times.size(); ++m) {
        const double t = times[m];
        for (const auto& state : solution.states) {
            const Complex overlap = state.psi(jj) * state.psi(ii);
            if (auto* group = residue_group(g, state.state_class, t))
                (*group)[m] += -std::exp(-kI * state.energy * t) * overlap *
                               (state.lambda * state.lambda - 1.0) * pole_factor(state);
            for (const int sigma : {1, -1})
                g.branch[m] += branch_prefactor(t, sigma) * overlap * edge_factor(sigma) /
                               (2.0 * sigma + state.energy);
        }
    }
    return series;
}

AmplitudeSeries from_values(std::vector<double> times, std::vector<Complex> values, Method method)
{
    AmplitudeSeries series;
    series.times = std::move(times);
    series.values = std::move(values);
    series.method = method;
    return series;
}

void check_k(double k)
{
    if (!(k > 1e-12 && k < std::numbers::pi - 1e-12))
        fail(ErrorCode::BandEdgeK, "k must lie strictly inside (0, pi)");
}

FieldLayout lead_only_layout(const OpenLatticeModel& model, std::size_t lead, int extent)
{
    FieldLayout layout;
    layout.dots = false;
    layout.lead_extent.assign(model.n_leads(), 0);
    layout.lead_extent[lead] = extent;
    return layout;
}

}  // namespace

std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::Quadrature: return "quadrature";
    case Method::Poles: return "poles";
    case Method::Oracle: return "oracle";
    }
    return "unknown";
}

const std::vector<Complex>& TermGroups::by_name(std::string_view name) const
{
    if (name == "res")
        return res;
    if (name == "ar")
        return ar;
    if (name == "bound_ab")
        return bound_ab;
    if (name == "branch")
        return branch;
    if (name == "plane")
        return plane;
    fail(ErrorCode::InvalidInput, "unknown term group '" + std::string(name) + "'");
}

std::optional<std::string> saddle_overlap_warning(const SpectralSolution& solution, double t)
{
    if (t == 0.0)
        return std::nullopt;
    const double width = 3.0 / std::sqrt(std::abs(t));
    for (const auto& state : solution.states) {
        if (state.lambda.imag() != 0.0)
            continue;
        const double l = state.lambda.real();
        if (std::abs(l - 1.0) < width || std::abs(l + 1.0) < width)
            return "SaddleOverlapWarning: real lambda = " + std::to_string(l) +
                   " lies inside the band-edge saddle width at |t| = " + std::to_string(std::abs(t));
    }
    return std::nullopt;
}

AmplitudeSeries survival_amplitude_quadrature(const OpenLatticeModel& model, const SpectralSolution& solution,
                                              std::size_t i, std::size_t j, const std::vector<double>& times,
                                              const QuadratureOptions& options)
{
    if (i >= model.n_sites() || j >= model.n_sites())
        fail(ErrorCode::BadSiteIndex, "dot index out of range");
    FieldLayout layout;
    layout.lead_extent.assign(model.n_leads(), 0);
    std::vector<Complex> values;
    values.reserve(times.size());
    const FieldSource source = FieldSource::dot(i);
    for (const double t : times)
        values.push_back(propagate_field(model, solution, source, layout, t, options).total(
            static_cast<Eigen::Index>(j)));
    return from_values(times, std::move(values), Method::Quadrature);
}

AmplitudeSeries survival_amplitude_poles(const SpectralSolution& solution, std::size_t i, std::size_t j,
                                         const std::vector<double>& times)
{
    AmplitudeSeries series = pole_series(
        solution, i, j, times, [](const DiscreteState&) { return Complex(1.0); },
        [](int) { return Complex(1.0); });
    finish_series(series, solution);
    return series;
}

AmplitudeSeries survival_amplitude_oracle(const ExactPropagator& propagator, std::size_t i, std::size_t j,
                                          const std::vector<double>& times)
{
    std::vector<Complex> values;
    for (const double t : times)
        values.push_back(propagator.amplitude(SiteRef::dot(j), SiteRef::dot(i), t));
    return from_values(times, std::move(values), Method::Oracle);
}

AmplitudeSeries escaping_amplitude_x_quadrature(const OpenLatticeModel& model, const SpectralSolution& solution,
                                                std::size_t lead, int x, std::size_t i,
                                                const std::vector<double>& times, const QuadratureOptions& options)
{
    model.lead(lead);
    if (x < 1)
        fail(ErrorCode::InvalidInput, "lead coordinate must be >= 1");
    const FieldLayout layout = lead_only_layout(model, lead, x);
    const FieldSource source = FieldSource::dot(i);
    std::vector<Complex> values;
    for (const double t : times)
        values.push_back(propagate_field(model, solution, source, layout, t, options).total(x - 1));
    return from_values(times, std::move(values), Method::Quadrature);
}

AmplitudeSeries escaping_amplitude_x_poles(const OpenLatticeModel& model, const SpectralSolution& solution,
                                           std::size_t lead, int x, std::size_t i, const std::vector<double>& times)
{
    const auto& attachment = model.lead(lead);
    if (x < 1)
        fail(ErrorCode::InvalidInput, "lead coordinate must be >= 1");
    const double coupling = attachment.coupling;
    AmplitudeSeries series = pole_series(
        solution, i, attachment.site, times,
        [&](const DiscreteState& s) { return coupling * std::pow(s.lambda, x); },
        [&](int sigma) { return Complex(coupling * std::pow(static_cast<double>(sigma), x)); });
    finish_series(series, solution);
    return series;
}

AmplitudeSeries escaping_amplitude_x_oracle(const ExactPropagator& propagator, std::size_t lead, int x,
                                            std::size_t i, const std::vector<double>& times)
{
    std::vector<Complex> values;
    for (const double t : times)
        values.push_back(propagator.amplitude(SiteRef::lead(lead, x), SiteRef::dot(i), t));
    return from_values(times, std::move(values), Method::Oracle);
}

int escape_window(const SpectralSolution& solution, double t)
{
    double tail = 0.0;
    for (const auto& state : solution.states)
        if (state.state_class == StateClass::Bound && std::abs(state.lambda) > 0.0)
            tail = std::max(tail, std::log(1e-14) / std::log(std::abs(state.lambda)));
    return static_cast<int>(std::ceil(std::max(2.0 * std::abs(t) + 80.0, tail)));
}

AmplitudeSeries escaping_amplitude_k_quadrature(const OpenLatticeModel& model, const SpectralSolution& solution,
                                                std::size_t lead, double k, std::size_t i,
                                                const std::vector<double>& times, const QuadratureOptions& options)
{
    check_k(k);
    model.lead(lead);
    const FieldSource source = FieldSource::dot(i);
    std::vector<Complex> values;
    for (const double t : times) {
        const int window = escape_window(solution, t);
        const Eigen::VectorXcd field =
            propagate_field(model, solution, source, lead_only_layout(model, lead, window), t, options).total;
        Complex sum = 0.0;
        for (int x = 1; x <= window; ++x)
            sum += std::sqrt(2.0) * std::sin(k * x) * field(x - 1);
        values.push_back(sum);
    }
    return from_values(times, std::move(values), Method::Quadrature);
}

AmplitudeSeries escaping_amplitude_k_poles(const OpenLatticeModel& model, const SpectralSolution& solution,
                                           std::size_t lead, double k, std::size_t i, const std::vector<double>& times)
{
    check_k(k);
    const auto& attachment = model.lead(lead);
    const double prefactor = std::sqrt(2.0) * attachment.coupling * std::sin(k);
    const double cos_k = std::cos(k);
    // Residues of the dot pole carry 1/(E_n + 2 cos k) and the opposite sign of the survival kernel.
    AmplitudeSeries series = pole_series(
        solution, i, attachment.site, times,
        [&](const DiscreteState& s) { return -prefactor / (s.energy + 2.0 * cos_k); },
        [&](int sigma) { return Complex(prefactor / (2.0 * sigma - 2.0 * cos_k)); });
    auto& g = *series.groups;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(attachment.site);
    for (std::size_t m = 0; m < times.size(); ++m) {
        const double t = times[m];
        const Complex wave = std::polar(1.0, t > 0.0 ? k : -k);
        const Complex phase = std::polar(1.0, 2.0 * t * cos_k);
        for (const auto& state : solution.states)
            g.plane[m] -= prefactor * phase * wave * state.lambda / (wave - state.lambda) * state.psi(jj) *
                          state.psi(ii);
    }
    finish_series(series, solution);
    return series;
}

AmplitudeSeries escaping_amplitude_k_oracle(const ExactPropagator& propagator, const SpectralSolution& solution,
                                            std::size_t lead, double k, std::size_t i,
                                            const std::vector<double>& times)
{
    check_k(k);
    std::vector<Complex> values;
    for (const double t : times) {
        const int window = escape_window(solution, t);
        check_horizon(propagator, t, window);
        const Eigen::VectorXcd field = propagator.evolve_site(SiteRef::dot(i), t);
        const Eigen::Index offset = propagator.system().row(SiteRef::lead(lead, 1));
        Complex sum = 0.0;
        for (int x = 1; x <= window; ++x)
            sum += std::sqrt(2.0) * std::sin(k * x) * field(offset + x - 1);
        values.push_back(sum);
    }
    return from_values(times, std::move(values), Method::Oracle);
}

Complex free_lead_propagator(int x, int x_prime, double t)
{
    if (x < 1 || x_prime < 1)
        fail(ErrorCode::InvalidInput, "lead coordinates must be >= 1");
    const double span = std::abs(t);
    const auto nodes = std::bit_ceil(
        static_cast<std::size_t>(std::ceil(x + x_prime + 2.0 * span + 10.0 * std::cbrt(span) + 64.0)));
    Complex sum = 0.0;
    for (std::size_t m = 0; m < nodes; ++m) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(nodes);
        sum += 2.0 * std::sin(k * x) * std::sin(k * x_prime) * std::polar(1.0, 2.0 * t * std::cos(k));
    }
    return sum / static_cast<double>(nodes);
}

}  // namespace resonance
