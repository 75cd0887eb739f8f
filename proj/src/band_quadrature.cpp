#include "resonance/band_quadrature.hpp"

#include "resonance/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace resonance {

namespace {

constexpr double kContourGuard = 1e-6;

struct Evaluation {
    Eigen::VectorXcd total;
    std::vector<Eigen::VectorXcd> components;
};

// Sum_{x'} profile(x') z^{x'}.
Complex profile_transform(const Eigen::VectorXcd& profile, Complex z)
{
    Complex sum = 0.0;
    for (Eigen::Index x = profile.size(); x >= 1; --x)
        sum = (sum + profile(x - 1)) * z;
    return sum;
}

class FieldEvaluator {
public:
    FieldEvaluator(const OpenLatticeModel& model, const SpectralSolution& solution, const FieldSource& source,
                   const FieldLayout& layout, double t, bool want_components)
        : model_(model), solution_(solution), source_(source), layout_(layout), t_(t),
          want_components_(want_components), n_dot_(model.n_sites()), size_(layout.size(n_dot_))
    {
        if (source.kind == FieldSource::Kind::Dot) {
            if (source.index >= n_dot_)
                fail(ErrorCode::BadSiteIndex, "source dot index out of range");
        } else {
            source_site_ = model.lead(source.index).site;
            source_coupling_ = model.lead(source.index).coupling;
        }
        if (layout.lead_extent.size() != model.n_leads())
            fail(ErrorCode::InvalidInput, "field layout needs one extent per lead");
    }

    Evaluation operator()(std::size_t nodes) const
    {
        const std::size_t n_states = solution_.states.size();
        const std::size_t n_comp = want_components_ ? n_states + 1 : 0;
        Evaluation out;
        out.total = Eigen::VectorXcd::Zero(size_);
        out.components.assign(n_comp, Eigen::VectorXcd::Zero(size_));
        Eigen::VectorXcd free = Eigen::VectorXcd::Zero(size_);
        std::vector<Complex> h(n_states);
        const double m_inv = 1.0 / static_cast<double>(nodes);
        const bool lead_source = source_.kind == FieldSource::Kind::LeadProfile;
        const bool free_term = lead_source && layout_.lead_extent[source_.index] > 0;

        for (std::size_t m = 0; m < nodes; ++m) {
            const double k = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(m) * m_inv;
            const Complex lambda = std::polar(1.0, k);
            const Complex phase = std::polar(1.0, 2.0 * t_ * std::cos(k));
            const Complex weight = Complex(0.0, 2.0 * m_inv * std::sin(k)) * phase;
            Complex transform = 1.0;
            Complex free_factor = 0.0;
            if (lead_source) {
                transform = profile_transform(source_.profile, lambda);
                if (free_term) {
                    const Complex back = profile_transform(source_.profile, std::conj(lambda));
                    free_factor = 2.0 * m_inv * phase * (transform - back) / Complex(0.0, 2.0);
                }
            }
            for (std::size_t n = 0; n < n_states; ++n) {
                const auto& state = solution_.states[n];
                h[n] = weight * (lambda * state.lambda / (lambda - state.lambda)) * source_amplitude(state, transform);
            }
            if (want_components_) {
                for (std::size_t n = 0; n < n_states; ++n)
                    scatter(out.components[n + 1], lambda, [&](std::size_t site) {
                        return solution_.states[n].psi(static_cast<Eigen::Index>(site)) * h[n];
                    });
            } else {
                scatter(out.total, lambda, [&](std::size_t site) {
                    Complex sum = 0.0;
                    for (std::size_t n = 0; n < n_states; ++n)
                        sum += solution_.states[n].psi(static_cast<Eigen::Index>(site)) * h[n];
                    return sum;
                });
            }
            if (free_term) {
                const Eigen::Index offset = layout_.lead_offset(n_dot_, source_.index);
                Complex power = 1.0;
                for (int x = 1; x <= layout_.lead_extent[source_.index]; ++x) {
                    power *= lambda;
                    free(offset + x - 1) += free_factor * power.imag();
                }
            }
        }

        // Poles inside the unit disk.
        for (std::size_t n = 0; n < n_states; ++n) {
            const auto& state = solution_.states[n];
            if (std::abs(state.lambda) >= 1.0)
                continue;
            const Complex transform = lead_source ? profile_transform(source_.profile, state.lambda) : Complex(1.0);
            const Complex residue = std::exp(Complex(0.0, -1.0) * state.energy * t_) *
                                    (1.0 - state.lambda * state.lambda) * source_amplitude(state, transform);
            auto& target = want_components_ ? out.components[n + 1] : out.total;
            scatter(target, state.lambda, [&](std::size_t site) {
                return state.psi(static_cast<Eigen::Index>(site)) * residue;
            });
        }

        if (want_components_) {
            out.components[0] = free;
            for (const auto& c : out.components)
                out.total += c;
        } else {
            out.total += free;
        }
        return out;
    }

private:
    Complex source_amplitude(const DiscreteState& state, Complex transform) const
    {
        if (source_.kind == FieldSource::Kind::Dot)
            return state.psi(static_cast<Eigen::Index>(source_.index));
        return source_coupling_ * state.psi(static_cast<Eigen::Index>(source_site_)) * transform;
    }

    // target[dot j] += f(j); target[lead b, x] += t_b lambda^x f(site_b).
    template <class F>
    void scatter(Eigen::VectorXcd& target, Complex lambda, const F& dot_value) const
    {
        if (layout_.dots)
            for (std::size_t j = 0; j < n_dot_; ++j)
                target(static_cast<Eigen::Index>(j)) += dot_value(j);
        for (std::size_t b = 0; b < layout_.lead_extent.size(); ++b) {
            const int extent = layout_.lead_extent[b];
            if (extent <= 0)
                continue;
            const auto& lead = model_.lead(b);
            const Complex u = lead.coupling * dot_value(lead.site);
            const Eigen::Index offset = layout_.lead_offset(n_dot_, b);
            Complex power = 1.0;
            for (int x = 1; x <= extent; ++x) {
                power *= lambda;
                target(offset + x - 1) += u * power;
            }
        }
    }

    const OpenLatticeModel& model_;
    const SpectralSolution& solution_;
    const FieldSource& source_;
    const FieldLayout& layout_;
    double t_;
    bool want_components_;
    std::size_t n_dot_;
    Eigen::Index size_;
    std::size_t source_site_ = 0;
    double source_coupling_ = 0.0;
};

double max_difference(const Evaluation& a, const Evaluation& b)
{
    double worst = a.total.size() > 0 ? (a.total - b.total).cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t c = 0; c < a.components.size(); ++c)
        if (a.components[c].size() > 0)
            worst = std::max(worst, (a.components[c] - b.components[c]).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace

FieldSource FieldSource::dot(std::size_t i)
{
    return FieldSource{Kind::Dot, i, {}};
}

FieldSource FieldSource::lead_profile(std::size_t lead, Eigen::VectorXcd profile)
{
    return FieldSource{Kind::LeadProfile, lead, std::move(profile)};
}

Eigen::Index FieldLayout::size(std::size_t n_dot) const
{
    Eigen::Index total = dots ? static_cast<Eigen::Index>(n_dot) : 0;
    for (const int e : lead_extent)
        total += std::max(0, e);
    return total;
}

Eigen::Index FieldLayout::lead_offset(std::size_t n_dot, std::size_t lead) const
{
    Eigen::Index offset = dots ? static_cast<Eigen::Index>(n_dot) : 0;
    for (std::size_t b = 0; b < lead; ++b)
        offset += std::max(0, lead_extent[b]);
    return offset;
}

int FieldLayout::max_extent() const
{
    int m = 0;
    for (const int e : lead_extent)
        m = std::max(m, e);
    return m;
}

double unit_circle_distance(const SpectralSolution& solution)
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& state : solution.states)
        d = std::min(d, std::abs(std::log(std::abs(state.lambda))));
    return d;
}

std::size_t starting_node_count(const SpectralSolution& solution, double t, int harmonic_extent)
{
    const double d = std::max(unit_circle_distance(solution), 1e-3);
    const double span = std::abs(t);
    const double estimate = harmonic_extent + 2.0 * span + 10.0 * std::cbrt(span) + 48.0 + 36.0 / std::min(d, 36.0);
    return std::bit_ceil(static_cast<std::size_t>(std::ceil(estimate)));
}

FieldResult propagate_field(const OpenLatticeModel& model, const SpectralSolution& solution,
                            const FieldSource& source, const FieldLayout& layout, double t,
                            const QuadratureOptions& options, bool want_components)
{
    if (!solution.complete())
        fail(ErrorCode::IncompleteSpectrum, "quadrature needs all 2N finite states");
    for (const auto& state : solution.states)
        if (std::abs(std::abs(state.lambda) - 1.0) <= kContourGuard)
            fail(ErrorCode::ContourPoleConflict, "a discrete state lies on the unit circle");
    const int source_extent = source.kind == FieldSource::Kind::LeadProfile
                                  ? static_cast<int>(source.profile.size())
                                  : 0;
    const FieldEvaluator evaluate(model, solution, source, layout, t, want_components);

    std::size_t nodes = std::min(starting_node_count(solution, t, layout.max_extent() + source_extent),
                                 options.max_nodes / 2);
    Evaluation previous = evaluate(nodes);
    for (;;) {
        nodes *= 2;
        Evaluation current = evaluate(nodes);
        const double diff = max_difference(previous, current);
        if (diff <= options.abs_tol) {
            return FieldResult{std::move(current.total), std::move(current.components), nodes, diff};
        }
        if (nodes * 2 > options.max_nodes)
            fail(ErrorCode::QuadratureFail, "unit-circle quadrature missed tolerance " +
                                                std::to_string(options.abs_tol) + " at " + std::to_string(nodes) +
                                                " nodes (change " + std::to_string(diff) + ")");
        previous = std::move(current);
    }
}

}  // namespace resonance
