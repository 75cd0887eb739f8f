#include "resonance/spectral_core.hpp"

#include "resonance/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace resonance {

namespace {

constexpr double kRealTolerance = 1e-9;
constexpr double kUnitCircleTolerance = 1e-9;
constexpr double kSingularB = 1e-10;
constexpr double kDegenerateGap = 1e-8;
constexpr double kInfiniteEigenvalue = 1e12;

struct RawPair {
    Complex lambda;
    Eigen::VectorXcd psi;
};

bool is_real_lambda(Complex lambda)
{
    return std::abs(lambda.imag()) <= kRealTolerance * (1.0 + std::abs(lambda));
}

Eigen::VectorXcd null_vector(const Eigen::MatrixXcd& z)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(z, Eigen::ComputeFullV);
    return svd.matrixV().col(z.cols() - 1);
}

// Two-sided Rayleigh quotient iteration for the complex-symmetric quadratic problem.
void refine(const OpenLatticeModel& model, RawPair& pair)
{
    Complex lambda = pair.lambda;
    Eigen::VectorXcd psi = pair.psi.normalized();
    const auto residual = [&](Complex l, const Eigen::VectorXcd& v) {
        return (z_matrix(model, l) * v).norm() / std::max(1.0, z_matrix(model, l).norm());
    };
    double best = residual(lambda, psi);
    const Complex start = lambda;
    for (int iter = 0; iter < 4; ++iter) {
        const Eigen::MatrixXcd z = z_matrix(model, lambda);
        const Eigen::MatrixXcd dz = z_derivative(model, lambda);
        const Complex denom = psi.transpose() * dz * psi;
        if (std::abs(denom) == 0.0)
            break;
        const Complex step = Complex(psi.transpose() * z * psi) / denom;
        const Complex next = lambda - step;
        Eigen::VectorXcd v = Eigen::PartialPivLU<Eigen::MatrixXcd>(z_matrix(model, next)).solve(dz * psi);
        if (!v.allFinite() || v.norm() == 0.0)
            break;
        v.normalize();
        const double r = residual(next, v);
        if (!(r < best) || std::abs(next - start) > 1e-6 * (1.0 + std::abs(start)))
            break;
        best = r;
        lambda = next;
        psi = v;
        if (std::abs(step) <= 1e-16 * std::abs(lambda))
            break;
    }
    pair.lambda = lambda;
    pair.psi = psi;
}

std::vector<RawPair> raw_eigenpairs(const OpenLatticeModel& model, const QuadraticPencil& pencil,
                                    std::size_t& n_infinite)
{
    const auto n = static_cast<Eigen::Index>(model.n_sites());
    const Eigen::VectorXd b_diag = pencil.b().diagonal();
    std::vector<RawPair> pairs;
    n_infinite = 0;
    if (b_diag.cwiseAbs().minCoeff() > kSingularB) {
        const Eigen::MatrixXd c = b_diag.cwiseInverse().asDiagonal() * pencil.a();
        Eigen::EigenSolver<Eigen::MatrixXd> solver(c, true);
        if (solver.info() != Eigen::Success)
            fail(ErrorCode::SolverFailure, "eigenvalue iteration did not converge");
        for (Eigen::Index m = 0; m < 2 * n; ++m) {
            const Complex lambda = solver.eigenvalues()(m);
            Eigen::VectorXcd top = solver.eigenvectors().col(m).head(n);
            if (top.norm() < 1e-8 * solver.eigenvectors().col(m).norm())
                top = solver.eigenvectors().col(m).tail(n) / lambda;
            pairs.push_back({lambda, top});
        }
    } else {
        Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> solver(pencil.a(), pencil.b(), false);
        if (solver.info() != Eigen::Success)
            fail(ErrorCode::SolverFailure, "QZ iteration did not converge");
        const double scale = pencil.a().norm() + pencil.b().norm();
        for (Eigen::Index m = 0; m < 2 * n; ++m) {
            const Complex alpha = solver.alphas()(m);
            const double beta = solver.betas()(m);
            if (std::abs(beta) <= 1e-13 * scale || std::abs(alpha) > kInfiniteEigenvalue * std::abs(beta)) {
                ++n_infinite;
                continue;
            }
            const Complex lambda = alpha / beta;
            pairs.push_back({lambda, null_vector(z_matrix(model, lambda))});
        }
    }
    for (auto& pair : pairs) {
        if (pair.lambda == Complex(0.0) || !std::isfinite(std::abs(pair.lambda)))
            fail(ErrorCode::SolverFailure, "solver returned an invalid eigenvalue");
        refine(model, pair);
    }
    return pairs;
}

void normalize(RawPair& pair, const Eigen::VectorXd& theta)
{
    const Complex l2 = pair.lambda * pair.lambda;
    const Eigen::VectorXcd& v = pair.psi;
    const Complex s = (1.0 - l2) * Complex(v.transpose() * v) +
                      l2 * Complex(v.transpose() * theta.cast<Complex>().asDiagonal() * v);
    if (std::abs(s) < 1e-14)
        fail(ErrorCode::SolverFailure, "state has vanishing metric norm (self-orthogonal)");
    pair.psi /= std::sqrt(s);
}

Eigen::Index largest_component(const Eigen::VectorXcd& v)
{
    Eigen::Index index = 0;
    v.cwiseAbs().maxCoeff(&index);
    return index;
}

// The metric fixes psi up to sign; choose the sign that makes the largest entry point right (or up).
void fix_sign(Eigen::VectorXcd& psi)
{
    const Complex lead = psi(largest_component(psi));
    const bool flip = std::abs(lead.real()) >= std::abs(lead.imag()) ? lead.real() < 0.0 : lead.imag() < 0.0;
    if (flip)
        psi = -psi;
}

void make_real_state(RawPair& pair)
{
    pair.lambda = Complex(pair.lambda.real(), 0.0);
    const Complex lead = pair.psi(largest_component(pair.psi));
    // After metric normalisation a real-lambda vector is either real or purely imaginary.
    if (std::abs(lead.real()) >= std::abs(lead.imag()))
        pair.psi = pair.psi.real().cast<Complex>();
    else
        pair.psi = Complex(0.0, 1.0) * pair.psi.imag().cast<Complex>();
}

}  // namespace

std::string_view to_string(StateClass c) noexcept
{
    switch (c) {
    case StateClass::Bound: return "Bound";
    case StateClass::AntiBound: return "AntiBound";
    case StateClass::Resonant: return "Resonant";
    case StateClass::AntiResonant: return "AntiResonant";
    case StateClass::Exceptional: return "Exceptional";
    }
    return "Unknown";
}

QuadraticPencil::QuadraticPencil(const OpenLatticeModel& model)
    : hd_(model.dot_matrix()), theta_(model.theta_diagonal())
{
    const auto n = hd_.rows();
    a_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a_.block(0, n, n, n).setIdentity();
    a_.block(n, 0, n, n).setIdentity();
    a_.block(n, n, n, n) = hd_;
    b_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    b_.block(0, 0, n, n).setIdentity();
    b_.block(n, n, n, n).diagonal() = theta_ - Eigen::VectorXd::Ones(n);
}

Eigen::MatrixXcd QuadraticPencil::z(Complex lambda) const
{
    const auto n = hd_.rows();
    Eigen::MatrixXcd z = lambda * hd_.cast<Complex>();
    z.diagonal() += lambda * lambda * (Eigen::VectorXd::Ones(n) - theta_).cast<Complex>() +
                    Eigen::VectorXcd::Ones(n);
    return z;
}

Eigen::MatrixXcd QuadraticPencil::x_factor(Complex lambda) const
{
    const auto n = hd_.rows();
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    Eigen::MatrixXcd top_left = -hd_.cast<Complex>();
    top_left.diagonal() -= lambda * (Eigen::VectorXd::Ones(n) - theta_).cast<Complex>();
    x.block(0, 0, n, n) = top_left;
    x.block(0, n, n, n).setIdentity();
    x.block(n, 0, n, n).setIdentity();
    return x;
}

Eigen::MatrixXcd QuadraticPencil::y1_factor(Complex lambda) const
{
    const auto n = hd_.rows();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
    y.block(n, 0, n, n).diagonal().setConstant(lambda);
    return y;
}

Eigen::MatrixXcd QuadraticPencil::y2_factor(Complex lambda) const
{
    const auto n = hd_.rows();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
    y.block(0, n, n, n).diagonal().setConstant(lambda);
    return y;
}

StateClass classify(Complex lambda)
{
    const double modulus = std::abs(lambda);
    if (std::abs(modulus - 1.0) <= kUnitCircleTolerance)
        return StateClass::Exceptional;
    if (is_real_lambda(lambda))
        return modulus < 1.0 ? StateClass::Bound : StateClass::AntiBound;
    if (modulus < 1.0)
        return StateClass::Exceptional;
    return lambda.imag() > 0.0 ? StateClass::Resonant : StateClass::AntiResonant;
}

SpectralSolution solve_discrete_states(const OpenLatticeModel& model, const SolveOptions& options)
{
    const QuadraticPencil pencil(model);
    SpectralSolution solution;
    solution.theta = model.theta_diagonal();
    auto pairs = raw_eigenpairs(model, pencil, solution.n_infinite);

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < pairs.size(); ++m) {
        for (std::size_t n = m + 1; n < pairs.size(); ++n) {
            const double scale = std::max(std::abs(pairs[m].lambda), std::abs(pairs[n].lambda));
            const double gap = std::abs(pairs[m].lambda - pairs[n].lambda) / scale;
            min_gap = std::min(min_gap, gap);
            if (gap <= kDegenerateGap && !options.allow_degenerate)
                fail(ErrorCode::DegenerateSpectrum,
                     "eigenvalues coincide to relative gap " + std::to_string(gap));
        }
    }
    solution.diagnostics.min_relative_gap = min_gap;
    if (min_gap <= kDegenerateGap)
        solution.diagnostics.warnings.push_back("DegenerateSpectrum: relative eigenvalue gap " +
                                                std::to_string(min_gap));

    // Real states; conjugate pairs are rebuilt from their upper-half member.
    std::vector<RawPair> finished;
    std::vector<std::pair<std::size_t, std::size_t>> partners;
    std::vector<bool> used(pairs.size(), false);
    for (std::size_t m = 0; m < pairs.size(); ++m) {
        if (used[m])
            continue;
        RawPair pair = pairs[m];
        if (is_real_lambda(pair.lambda)) {
            used[m] = true;
            pair.lambda = Complex(pair.lambda.real(), 0.0);
            pair.psi = pair.psi.real().cast<Complex>();
            if (pair.psi.norm() < 1e-8) {
                pair.psi = pairs[m].psi;
                pair.psi *= std::conj(pair.psi(largest_component(pair.psi))) /
                            std::abs(pair.psi(largest_component(pair.psi)));
                pair.psi = pair.psi.real().cast<Complex>();
            }
            normalize(pair, solution.theta);
            make_real_state(pair);
            fix_sign(pair.psi);
            finished.push_back(pair);
            partners.emplace_back(finished.size() - 1, finished.size() - 1);
            continue;
        }
        std::size_t best = pairs.size();
        double best_distance = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            if (n == m || used[n])
                continue;
            const double d = std::abs(pairs[n].lambda - std::conj(pair.lambda));
            if (d < best_distance) {
                best_distance = d;
                best = n;
            }
        }
        if (best == pairs.size() || best_distance > 1e-6 * (1.0 + std::abs(pair.lambda)))
            fail(ErrorCode::SolverFailure, "complex eigenvalue without a conjugate partner");
        used[m] = used[best] = true;
        RawPair upper = pair.lambda.imag() > 0.0 ? pair : pairs[best];
        const RawPair& lower = pair.lambda.imag() > 0.0 ? pairs[best] : pair;
        upper.lambda = 0.5 * (upper.lambda + std::conj(lower.lambda));
        normalize(upper, solution.theta);
        fix_sign(upper.psi);
        RawPair mirrored{std::conj(upper.lambda), upper.psi.conjugate()};
        finished.push_back(upper);
        finished.push_back(mirrored);
        partners.emplace_back(finished.size() - 2, finished.size() - 1);
    }

    std::vector<std::size_t> partner_of(finished.size());
    for (auto [p, q] : partners) {
        partner_of[p] = q;
        partner_of[q] = p;
    }
    std::vector<std::size_t> order(finished.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const Complex a = finished[x].lambda;
        const Complex b = finished[y].lambda;
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<std::size_t> position(finished.size());
    for (std::size_t s = 0; s < order.size(); ++s)
        position[order[s]] = s;

    for (std::size_t s = 0; s < order.size(); ++s) {
        const RawPair& pair = finished[order[s]];
        DiscreteState state;
        state.lambda = pair.lambda;
        const SheetPoint point = SheetPoint::from_lambda(pair.lambda);
        state.k = point.k;
        state.energy = point.energy;
        state.state_class = classify(pair.lambda);
        state.psi = pair.psi;
        state.partner_index = position[partner_of[order[s]]];
        solution.states.push_back(std::move(state));
    }

    auto& diag = solution.diagnostics;
    for (const auto& state : solution.states) {
        if (state.state_class == StateClass::Exceptional)
            diag.warnings.push_back("Exceptional state at lambda = (" + std::to_string(state.lambda.real()) + ", " +
                                    std::to_string(state.lambda.imag()) + ")");
        diag.max_pencil_residual = std::max(diag.max_pencil_residual, pencil_residual(pencil, state));
        const Eigen::MatrixXcd z = z_matrix(model, state.lambda);
        diag.max_relative_z_residual =
            std::max(diag.max_relative_z_residual, (z * state.psi).norm() / (z.norm() * state.psi.norm()));
    }
    if (!solution.states.empty()) {
        const Eigen::MatrixXcd overlap = biorthonormality_matrix(solution);
        diag.max_biorthonormality_error =
            (overlap - Eigen::MatrixXcd::Identity(overlap.rows(), overlap.cols())).cwiseAbs().maxCoeff();
    }
    return solution;
}

Complex extend_to_lead(const OpenLatticeModel& model, const DiscreteState& state, std::size_t lead, int x)
{
    const auto& attachment = model.lead(lead);
    if (x < 1)
        fail(ErrorCode::InvalidInput, "lead coordinate must be >= 1");
    if (static_cast<Eigen::Index>(attachment.site) >= state.psi.size())
        fail(ErrorCode::BadLead, "lead site outside the state's dot space");
    return attachment.coupling * std::pow(state.lambda, x) * state.psi(static_cast<Eigen::Index>(attachment.site));
}

Eigen::VectorXcd to_standard_norm(const DiscreteState& state)
{
    const Complex one_minus = 1.0 - state.lambda * state.lambda;
    if (std::abs(one_minus) <= 1e-12)
        fail(ErrorCode::UnitLambdaSquared, "lambda^2 = 1 has no standard normalisation");
    return std::sqrt(one_minus) * state.psi;
}

UnityReport verify_resolution_of_unity(const SpectralSolution& solution)
{
    if (!solution.complete())
        fail(ErrorCode::IncompleteSpectrum, std::to_string(solution.n_infinite) +
                                                " eigenvalue(s) at infinity; the finite states are not complete");
    const auto n = static_cast<Eigen::Index>(solution.n_sites());
    UnityReport report;
    report.residual = -Eigen::MatrixXcd::Identity(n, n);
    for (const auto& state : solution.states)
        report.residual += state.psi * state.psi.transpose();
    report.max_abs = n > 0 ? report.residual.cwiseAbs().maxCoeff() : 0.0;
    return report;
}

Eigen::MatrixXcd biorthonormality_matrix(const SpectralSolution& solution)
{
    const auto count = static_cast<Eigen::Index>(solution.states.size());
    const Eigen::VectorXcd theta = solution.theta.cast<Complex>();
    Eigen::MatrixXcd overlap(count, count);
    for (Eigen::Index m = 0; m < count; ++m) {
        const auto& sm = solution.states[static_cast<std::size_t>(m)];
        for (Eigen::Index n = 0; n < count; ++n) {
            const auto& sn = solution.states[static_cast<std::size_t>(n)];
            const Complex ll = sm.lambda * sn.lambda;
            const Complex plain = sm.psi.transpose() * sn.psi;
            const Complex weighted = sm.psi.transpose() * theta.asDiagonal() * sn.psi;
            overlap(m, n) = (1.0 - ll) * plain + ll * weighted;
        }
    }
    return overlap;
}

double pencil_residual(const QuadraticPencil& pencil, const DiscreteState& state)
{
    const auto n = state.psi.size();
    Eigen::VectorXcd stacked(2 * n);
    stacked << state.psi, state.lambda * state.psi;
    return ((pencil.a().cast<Complex>() - state.lambda * pencil.b().cast<Complex>()) * stacked).norm();
}

double diagonal_relation_error(const QuadraticPencil& pencil, const SpectralSolution& solution)
{
    double worst = 0.0;
    for (const auto& state : solution.states) {
        const auto n = state.psi.size();
        Eigen::VectorXcd stacked(2 * n);
        stacked << state.psi, state.lambda * state.psi;
        const Complex value = stacked.transpose() * pencil.a().cast<Complex>() * stacked;
        worst = std::max(worst, std::abs(value - state.lambda));
    }
    return worst;
}

}  // namespace resonance
