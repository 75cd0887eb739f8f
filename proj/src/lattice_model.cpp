#include "resonance/lattice_model.hpp"

#include "resonance/error.hpp"

#include <cmath>
#include <utility>

namespace resonance {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kUnitCircleTolerance = 1e-9;

}  // namespace

OpenLatticeModel::OpenLatticeModel(Eigen::MatrixXd dot_matrix, std::vector<LeadAttachment> leads)
    : dot_matrix_(std::move(dot_matrix)), leads_(std::move(leads))
{
    const auto n = dot_matrix_.rows();
    if (n == 0 || dot_matrix_.cols() != n)
        fail(ErrorCode::InvalidInput, "dot matrix must be square with at least one site");
    if (!dot_matrix_.allFinite())
        fail(ErrorCode::NonSymmetricDot, "dot matrix has non-finite entries");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double a = dot_matrix_(i, j);
            const double b = dot_matrix_(j, i);
            if (std::abs(a - b) > kSymmetryTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b))))
                fail(ErrorCode::NonSymmetricDot,
                     "entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") and (" +
                         std::to_string(j + 1) + "," + std::to_string(i + 1) + ") differ");
            const double mean = 0.5 * (a + b);
            dot_matrix_(i, j) = mean;
            dot_matrix_(j, i) = mean;
        }
    }
    if (leads_.empty())
        fail(ErrorCode::NoLeads, "at least one lead must be attached");
    theta_ = Eigen::VectorXd::Zero(n);
    for (const auto& lead : leads_) {
        if (lead.site >= static_cast<std::size_t>(n))
            fail(ErrorCode::BadSiteIndex, "lead '" + lead.label + "' attaches to site " +
                                              std::to_string(lead.site + 1) + " outside [1, " +
                                              std::to_string(n) + "]");
        if (!std::isfinite(lead.coupling) || lead.coupling == 0.0)
            fail(ErrorCode::InvalidInput, "lead '" + lead.label + "' needs a finite nonzero coupling");
        theta_(static_cast<Eigen::Index>(lead.site)) += lead.coupling * lead.coupling;
    }
}

const LeadAttachment& OpenLatticeModel::lead(std::size_t index) const
{
    if (index >= leads_.size())
        fail(ErrorCode::BadLead, "lead index " + std::to_string(index) + " out of range");
    return leads_[index];
}

std::optional<std::size_t> OpenLatticeModel::find_lead(std::string_view label) const
{
    for (std::size_t a = 0; a < leads_.size(); ++a)
        if (leads_[a].label == label)
            return a;
    return std::nullopt;
}

OpenLatticeModel build_model(const ModelConfig& config)
{
    if (config.dot_matrix)
        return OpenLatticeModel(*config.dot_matrix, config.leads);

    const std::size_t n = config.n_sites;
    if (n == 0)
        fail(ErrorCode::InvalidInput, "n_sites must be positive");
    if (config.epsilon.size() != n)
        fail(ErrorCode::InvalidInput, "epsilon has " + std::to_string(config.epsilon.size()) +
                                          " entries, expected " + std::to_string(n));
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(size, size);
    for (std::size_t i = 0; i < n; ++i)
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = config.epsilon[i];
    for (const auto& hop : config.hoppings) {
        if (hop.i >= n || hop.j >= n)
            fail(ErrorCode::BadSiteIndex, "hopping (" + std::to_string(hop.i + 1) + "," +
                                              std::to_string(hop.j + 1) + ") outside [1, " +
                                              std::to_string(n) + "]");
        if (hop.i == hop.j)
            fail(ErrorCode::InvalidInput, "hopping from a site to itself; use epsilon");
        const auto i = static_cast<Eigen::Index>(hop.i);
        const auto j = static_cast<Eigen::Index>(hop.j);
        if (seen(i, j) != 0) {
            // A pair given twice must agree in both directions.
            if (std::abs(h(i, j) + hop.t) > kSymmetryTolerance * std::max(1.0, std::abs(hop.t)))
                fail(ErrorCode::NonSymmetricDot, "pair (" + std::to_string(hop.i + 1) + "," +
                                                     std::to_string(hop.j + 1) +
                                                     ") listed twice with different hoppings");
            continue;
        }
        h(i, j) = -hop.t;
        h(j, i) = -hop.t;
        seen(i, j) = seen(j, i) = 1;
    }
    return OpenLatticeModel(std::move(h), config.leads);
}

Eigen::MatrixXd theta_matrix(const OpenLatticeModel& model)
{
    return model.theta_diagonal().asDiagonal();
}

Complex energy_of(Complex lambda)
{
    if (lambda == Complex(0.0))
        fail(ErrorCode::ZeroLambda, "lambda = 0 maps to infinite energy");
    return -lambda - 1.0 / lambda;
}

SheetPoint SheetPoint::from_lambda(Complex lambda)
{
    const Complex energy = energy_of(lambda);
    const Complex k = -Complex(0.0, 1.0) * std::log(lambda);
    return SheetPoint{lambda, k, energy};
}

SheetPoint lambda_from_energy(Complex energy, Sheet sheet)
{
    // lambda^2 + E lambda + 1 = 0; pick the larger-magnitude root without cancellation.
    const Complex disc = std::sqrt(energy * energy - 4.0);
    const Complex plus = -0.5 * (energy + disc);
    const Complex minus = -0.5 * (energy - disc);
    const Complex big = std::abs(plus) >= std::abs(minus) ? plus : minus;
    const Complex small = 1.0 / big;
    if (std::abs(std::abs(big) - 1.0) <= kUnitCircleTolerance) {
        if (std::abs(big - small) <= 1e-6)
            fail(ErrorCode::BranchPoint, "energy sits on a band edge (double root lambda = +-1)");
        fail(ErrorCode::BranchPoint, "energy lies on the band cut; |lambda| = 1 for both roots");
    }
    return SheetPoint::from_lambda(sheet == Sheet::First ? small : big);
}

Eigen::MatrixXcd effective_hamiltonian(const OpenLatticeModel& model, const SheetPoint& point)
{
    if (point.lambda == Complex(0.0))
        fail(ErrorCode::ZeroLambda, "self-energy undefined at lambda = 0");
    Eigen::MatrixXcd h = model.dot_matrix().cast<Complex>();
    h.diagonal() -= point.lambda * model.theta_diagonal().cast<Complex>();
    return h;
}

Eigen::MatrixXcd z_matrix(const OpenLatticeModel& model, Complex lambda)
{
    const auto n = static_cast<Eigen::Index>(model.n_sites());
    Eigen::MatrixXcd z = lambda * model.dot_matrix().cast<Complex>();
    const Eigen::VectorXcd one_minus_theta =
        (Eigen::VectorXd::Ones(n) - model.theta_diagonal()).cast<Complex>();
    z.diagonal() += lambda * lambda * one_minus_theta + Eigen::VectorXcd::Ones(n);
    return z;
}

Eigen::MatrixXcd z_derivative(const OpenLatticeModel& model, Complex lambda)
{
    const auto n = static_cast<Eigen::Index>(model.n_sites());
    Eigen::MatrixXcd dz = model.dot_matrix().cast<Complex>();
    dz.diagonal() += 2.0 * lambda * (Eigen::VectorXd::Ones(n) - model.theta_diagonal()).cast<Complex>();
    return dz;
}

}  // namespace resonance
