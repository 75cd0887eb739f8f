#include "resonance/truncation_oracle.hpp"

#include "resonance/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace resonance {

TruncatedSystem::TruncatedSystem(const OpenLatticeModel& model, int lead_length)
    : lead_length_(lead_length), n_dot_(model.n_sites()), n_leads_(model.n_leads())
{
    if (lead_length < 1)
        fail(ErrorCode::InvalidInput, "lead length must be positive");
    const auto n = static_cast<Eigen::Index>(n_dot_);
    const Eigen::Index dim = n + static_cast<Eigen::Index>(n_leads_) * lead_length;
    hamiltonian_ = Eigen::MatrixXd::Zero(dim, dim);
    hamiltonian_.topLeftCorner(n, n) = model.dot_matrix();
    for (std::size_t a = 0; a < n_leads_; ++a) {
        const auto& lead = model.lead(a);
        const Eigen::Index first = row(SiteRef::lead(a, 1));
        const auto dot = static_cast<Eigen::Index>(lead.site);
        hamiltonian_(dot, first) = hamiltonian_(first, dot) = -lead.coupling;
        for (int x = 1; x < lead_length; ++x)
            hamiltonian_(first + x - 1, first + x) = hamiltonian_(first + x, first + x - 1) = -1.0;
    }
}

Eigen::Index TruncatedSystem::row(const SiteRef& site) const
{
    if (site.is_dot()) {
        if (site.index >= n_dot_)
            fail(ErrorCode::BadSiteIndex, "dot index " + std::to_string(site.index + 1) + " out of range");
        return static_cast<Eigen::Index>(site.index);
    }
    if (site.index >= n_leads_)
        fail(ErrorCode::BadLead, "lead index " + std::to_string(site.index) + " out of range");
    if (site.x < 1 || site.x > lead_length_)
        fail(ErrorCode::InvalidInput, "lead site x = " + std::to_string(site.x) + " outside the truncated lead");
    return static_cast<Eigen::Index>(n_dot_ + site.index * static_cast<std::size_t>(lead_length_)) + site.x - 1;
}

TruncatedSystem truncate(const OpenLatticeModel& model, int lead_length)
{
    return TruncatedSystem(model, lead_length);
}

ExactPropagator::ExactPropagator(TruncatedSystem system) : system_(std::move(system))
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(system_.hamiltonian());
    if (solver.info() != Eigen::Success)
        fail(ErrorCode::SolverFailure, "symmetric eigensolver failed on the truncated lattice");
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

double ExactPropagator::horizon(int farthest_probe) const noexcept
{
    return 0.9 * 0.5 * static_cast<double>(system_.lead_length() - std::max(0, farthest_probe));
}

Eigen::VectorXcd ExactPropagator::evolve(const Eigen::VectorXcd& initial, double t) const
{
    if (initial.size() != system_.dimension())
        fail(ErrorCode::InvalidInput, "state size does not match the truncated lattice");
    Eigen::VectorXcd modes = vectors_.transpose().cast<Complex>() * initial;
    for (Eigen::Index m = 0; m < modes.size(); ++m)
        modes(m) *= std::polar(1.0, -energies_(m) * t);
    return vectors_.cast<Complex>() * modes;
}

Eigen::VectorXcd ExactPropagator::evolve_site(const SiteRef& source, double t) const
{
    const Eigen::Index s = system_.row(source);
    Eigen::VectorXcd modes = vectors_.row(s).transpose().cast<Complex>();
    for (Eigen::Index m = 0; m < modes.size(); ++m)
        modes(m) *= std::polar(1.0, -energies_(m) * t);
    return vectors_.cast<Complex>() * modes;
}

Complex ExactPropagator::amplitude(const SiteRef& sink, const SiteRef& source, double t) const
{
    check_horizon(*this, t, std::max(sink.is_dot() ? 0 : sink.x, source.is_dot() ? 0 : source.x));
    const Eigen::Index a = system_.row(sink);
    const Eigen::Index b = system_.row(source);
    Complex sum = 0.0;
    for (Eigen::Index m = 0; m < energies_.size(); ++m)
        sum += vectors_(a, m) * vectors_(b, m) * std::polar(1.0, -energies_(m) * t);
    return sum;
}

Complex ExactPropagator::resolvent(const SiteRef& a, const SiteRef& b, Complex energy) const
{
    const Eigen::Index ra = system_.row(a);
    const Eigen::Index rb = system_.row(b);
    Complex sum = 0.0;
    for (Eigen::Index m = 0; m < energies_.size(); ++m)
        sum += vectors_(ra, m) * vectors_(rb, m) / (energy - energies_(m));
    return sum;
}

void check_horizon(const ExactPropagator& propagator, double t, int farthest_probe)
{
    const double limit = propagator.horizon(farthest_probe);
    if (std::abs(t) > limit)
        fail(ErrorCode::HorizonExceeded, "|t| = " + std::to_string(std::abs(t)) + " exceeds the oracle horizon " +
                                             std::to_string(limit) + " for L = " +
                                             std::to_string(propagator.system().lead_length()));
}

std::vector<Eigen::VectorXcd> exact_propagate(const ExactPropagator& propagator, const SiteRef& source,
                                              const std::vector<double>& times, int farthest_probe)
{
    std::vector<Eigen::VectorXcd> fields;
    fields.reserve(times.size());
    for (const double t : times) {
        check_horizon(propagator, t, farthest_probe);
        fields.push_back(propagator.evolve_site(source, t));
    }
    return fields;
}

Complex det_z(const OpenLatticeModel& model, Complex lambda)
{
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(z_matrix(model, lambda)).determinant();
}

DeterminantRoots det_z_roots(const OpenLatticeModel& model)
{
    const int max_degree = 2 * static_cast<int>(model.n_sites());
    const int samples = max_degree + 1 + 8;
    // Coefficients from samples on the unit circle (an exact DFT for a polynomial of this degree).
    std::vector<Complex> values(static_cast<std::size_t>(samples));
    for (int m = 0; m < samples; ++m)
        values[static_cast<std::size_t>(m)] = det_z(model, std::polar(1.0, 2.0 * std::numbers::pi * m / samples));
    std::vector<Complex> coeff(static_cast<std::size_t>(samples));
    double largest = 0.0;
    for (int k = 0; k < samples; ++k) {
        Complex sum = 0.0;
        for (int m = 0; m < samples; ++m)
            sum += values[static_cast<std::size_t>(m)] * std::polar(1.0, -2.0 * std::numbers::pi * m * k / samples);
        coeff[static_cast<std::size_t>(k)] = sum / static_cast<double>(samples);
        largest = std::max(largest, std::abs(sum) / samples);
    }

    DeterminantRoots result;
    int degree = -1;
    for (int k = max_degree; k >= 0; --k) {
        const double rel = std::abs(coeff[static_cast<std::size_t>(k)]) / largest;
        if (rel > 1e-10) {
            degree = k;
            break;
        }
        if (rel > 1e-13)
            fail(ErrorCode::IllConditionedPolynomial,
                 "leading coefficient of det Z is ambiguous (relative size " + std::to_string(rel) + ")");
    }
    for (int k = max_degree + 1; k < samples; ++k)
        if (std::abs(coeff[static_cast<std::size_t>(k)]) > 1e-9 * largest)
            fail(ErrorCode::IllConditionedPolynomial, "det Z samples are not a polynomial of the expected degree");
    if (degree < 0)
        fail(ErrorCode::IllConditionedPolynomial, "det Z vanishes identically");

    result.coefficients = Eigen::VectorXcd(degree + 1);
    for (int k = 0; k <= degree; ++k)
        result.coefficients(k) = coeff[static_cast<std::size_t>(k)];
    if (degree == 0)
        return result;

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (int r = 1; r < degree; ++r)
        companion(r, r - 1) = 1.0;
    for (int r = 0; r < degree; ++r)
        companion(r, degree - 1) = -result.coefficients(r) / result.coefficients(degree);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        fail(ErrorCode::IllConditionedPolynomial, "companion eigenvalues did not converge");

    for (Eigen::Index r = 0; r < solver.eigenvalues().size(); ++r) {
        Complex lambda = solver.eigenvalues()(r);
        for (int iter = 0; iter < 10; ++iter) {
            const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z_matrix(model, lambda));
            if (!(lu.rcond() > 1e-15))
                break;
            const Complex log_derivative = (lu.solve(z_derivative(model, lambda))).trace();
            const Complex step = 1.0 / log_derivative;
            lambda -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(lambda)))
                break;
        }
        Complex p = 0.0;
        Complex dp = 0.0;
        double magnitude = 0.0;
        for (int k = degree; k >= 0; --k) {
            dp = dp * lambda + p;
            p = p * lambda + result.coefficients(k);
            magnitude = magnitude * std::abs(lambda) + std::abs(result.coefficients(k));
        }
        const double condition = magnitude / std::max(std::abs(lambda) * std::abs(dp), 1e-300);
        result.condition_estimate = std::max(result.condition_estimate, condition);
        result.roots.push_back(lambda);
    }
    if (result.condition_estimate > 1e12)
        fail(ErrorCode::IllConditionedPolynomial,
             "root condition estimate " + std::to_string(result.condition_estimate));
    return result;
}

double multiset_distance(std::vector<Complex> a, std::vector<Complex> b)
{
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                const double d = std::abs(a[i] - b[j]) / std::max(1.0, std::abs(a[i]));
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return worst;
}

}  // namespace resonance
