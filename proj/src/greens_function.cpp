#include "resonance/greens_function.hpp"

#include "resonance/error.hpp"

#include <cmath>

namespace resonance {

namespace {

constexpr double kPoleGuard = 1e-6;
constexpr double kSingularRcond = 1e-14;
constexpr double kBoundaryTolerance = 1e-9;

bool near_pole(const SpectralSolution& solution, Complex lambda)
{
    for (const auto& state : solution.states)
        if (std::abs(lambda - state.lambda) <= kPoleGuard * std::max(1.0, std::abs(state.lambda)))
            return true;
    return false;
}

void check_lead_lambda(Complex lambda, LeadBoundary boundary)
{
    const double modulus = std::abs(lambda);
    if (boundary == LeadBoundary::Allow) {
        if (modulus > 1.0 + kBoundaryTolerance)
            fail(ErrorCode::UnitCircleLambda, "lead elements need |lambda| <= 1");
        if (std::abs(lambda - 1.0) <= kBoundaryTolerance || std::abs(lambda + 1.0) <= kBoundaryTolerance)
            fail(ErrorCode::UnitCircleLambda, "lead elements diverge at the band edges lambda = +-1");
        return;
    }
    if (modulus >= 1.0 - kBoundaryTolerance)
        fail(ErrorCode::UnitCircleLambda, "closed-form lead elements need a first-sheet lambda (|lambda| < 1)");
}

void check_dot_index(const SpectralSolution& solution, std::size_t i)
{
    if (i >= solution.n_sites())
        fail(ErrorCode::BadSiteIndex, "dot index " + std::to_string(i + 1) + " out of range");
}

Complex assemble(const OpenLatticeModel& model, const SheetPoint& point, const SiteRef& a, const SiteRef& b,
                 LeadBoundary boundary, const auto& g_eff_element)
{
    if (!a.is_dot() || !b.is_dot())
        check_lead_lambda(point.lambda, boundary);
    const DotProjection pa = project_to_dot(model, a, point.lambda);
    const DotProjection pb = project_to_dot(model, b, point.lambda);
    Complex value = pa.factor * pb.factor * g_eff_element(pa.dot_site, pb.dot_site);
    // Sites on different leads share no free term.
    if (!a.is_dot() && !b.is_dot() && a.index == b.index)
        value += lead_green_element(point, a.x, b.x, boundary);
    return value;
}

}  // namespace

DotProjection project_to_dot(const OpenLatticeModel& model, const SiteRef& site, Complex lambda)
{
    if (site.is_dot()) {
        if (site.index >= model.n_sites())
            fail(ErrorCode::BadSiteIndex, "dot index " + std::to_string(site.index + 1) + " out of range");
        return {site.index, Complex(1.0)};
    }
    const auto& lead = model.lead(site.index);
    if (site.x < 1)
        fail(ErrorCode::InvalidInput, "lead coordinate must be >= 1");
    return {lead.site, lead.coupling * std::pow(lambda, site.x)};
}

Eigen::MatrixXcd g_eff_direct(const OpenLatticeModel& model, const SheetPoint& point)
{
    if (point.lambda == Complex(0.0))
        return Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(model.n_sites()),
                                      static_cast<Eigen::Index>(model.n_sites()));
    const Eigen::MatrixXcd z = z_matrix(model, point.lambda);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z);
    if (!(lu.rcond() > kSingularRcond))
        fail(ErrorCode::SingularAtPole, "Z(lambda) is singular; lambda sits on a discrete state");
    return -point.lambda * lu.inverse();
}

Complex g_eff_expanded_element(const SpectralSolution& solution, Complex lambda, std::size_t i, std::size_t j)
{
    check_dot_index(solution, i);
    check_dot_index(solution, j);
    if (near_pole(solution, lambda))
        fail(ErrorCode::PoleHit, "lambda within the pole guard of a discrete state");
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    Complex sum = 0.0;
    for (const auto& state : solution.states)
        sum += state.psi(ii) * state.psi(jj) * (lambda * state.lambda / (lambda - state.lambda));
    return sum;
}

Eigen::MatrixXcd g_eff_expanded(const SpectralSolution& solution, const SheetPoint& point)
{
    if (!solution.complete())
        fail(ErrorCode::IncompleteSpectrum, "expansion needs all 2N finite states");
    if (near_pole(solution, point.lambda))
        fail(ErrorCode::PoleHit, "lambda within the pole guard of a discrete state");
    const auto n = static_cast<Eigen::Index>(solution.n_sites());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& state : solution.states)
        g += (point.lambda * state.lambda / (point.lambda - state.lambda)) * state.psi * state.psi.transpose();
    return g;
}

SheetPoint retarded_point(double energy)
{
    if (!(std::abs(energy) < 2.0 - 1e-12))
        fail(ErrorCode::BandEdge, "energy must lie strictly inside the band (-2, 2)");
    const double k = std::acos(-0.5 * energy);
    return SheetPoint{std::polar(1.0, k), Complex(k), Complex(energy)};
}

Eigen::MatrixXcd g_retarded_advanced_sum(const SpectralSolution& solution, double energy)
{
    if (!(std::abs(energy) < 2.0 - 1e-12))
        fail(ErrorCode::BandEdge, "energy must lie strictly inside the band (-2, 2)");
    if (!solution.complete())
        fail(ErrorCode::IncompleteSpectrum, "expansion needs all 2N finite states");
    const auto n = static_cast<Eigen::Index>(solution.n_sites());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& state : solution.states) {
        const Eigen::VectorXcd phi = to_standard_norm(state);
        g += phi * phi.transpose() / (energy - state.energy);
    }
    return g;
}

Complex lead_green_element(const SheetPoint& point, int x, int y, LeadBoundary boundary)
{
    if (x < 1 || y < 1)
        fail(ErrorCode::InvalidInput, "lead coordinates must be >= 1");
    check_lead_lambda(point.lambda, boundary);
    const Complex l = point.lambda;
    return -(std::pow(l, x + y) - std::pow(l, std::abs(x - y))) / (l - 1.0 / l);
}

Complex full_green_element(const OpenLatticeModel& model, const SpectralSolution& solution,
                           const SheetPoint& point, const SiteRef& a, const SiteRef& b, LeadBoundary boundary)
{
    if (!solution.complete())
        fail(ErrorCode::IncompleteSpectrum, "expansion needs all 2N finite states");
    if (near_pole(solution, point.lambda)) {
        try {
            return full_green_element_direct(model, point, a, b, boundary);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularAtPole)
                fail(ErrorCode::PoleHit, "lambda coincides with a discrete state");
            throw;
        }
    }
    return assemble(model, point, a, b, boundary, [&](std::size_t i, std::size_t j) {
        return g_eff_expanded_element(solution, point.lambda, i, j);
    });
}

Complex full_green_element_direct(const OpenLatticeModel& model, const SheetPoint& point, const SiteRef& a,
                                  const SiteRef& b, LeadBoundary boundary)
{
    const Eigen::MatrixXcd g = g_eff_direct(model, point);
    return assemble(model, point, a, b, boundary, [&](std::size_t i, std::size_t j) {
        return g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

double transmission(const OpenLatticeModel& model, double energy, std::size_t lead_in, std::size_t lead_out)
{
    const SheetPoint point = retarded_point(energy);
    const auto& in = model.lead(lead_in);
    const auto& out = model.lead(lead_out);
    const Complex g = g_eff_direct(model, point)(static_cast<Eigen::Index>(out.site),
                                                 static_cast<Eigen::Index>(in.site));
    const double s = std::sin(point.k.real());
    const double couplings = in.coupling * out.coupling;
    return 4.0 * couplings * couplings * s * s * std::norm(g);
}

double reflection(const OpenLatticeModel& model, double energy, std::size_t lead)
{
    const SheetPoint point = retarded_point(energy);
    const auto& in = model.lead(lead);
    const auto site = static_cast<Eigen::Index>(in.site);
    const Complex g = g_eff_direct(model, point)(site, site);
    const double s = std::sin(point.k.real());
    const Complex r = -1.0 + Complex(0.0, 2.0) * in.coupling * in.coupling * s * g;
    return std::norm(r);
}

}  // namespace resonance
