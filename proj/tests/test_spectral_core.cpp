#include "support.hpp"

#include "resonance/error.hpp"
#include "resonance/random_model.hpp"
#include "resonance/spectral_core.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

using namespace resonance;
using testing::max_abs;

namespace {

// Durand-Kerner on the expanded T-model determinant -l^4 + 0.85 l^3 - l^2 - 0.85 l + 1.
std::vector<Complex> t_model_polynomial_roots()
{
    const std::array<double, 5> c{1.0, -0.85, 1.0, 0.85, -1.0};  // monic after dividing by -1, descending
    const auto p = [&](Complex z) {
        Complex v = 0.0;
        for (const double a : c)
            v = v * z + a;
        return v;
    };
    std::vector<Complex> z(4);
    for (std::size_t n = 0; n < z.size(); ++n)
        z[n] = std::pow(Complex(0.4, 0.9), static_cast<double>(n));
    for (int iter = 0; iter < 500; ++iter)
        for (std::size_t n = 0; n < z.size(); ++n) {
            Complex den = 1.0;
            for (std::size_t m = 0; m < z.size(); ++m)
                if (m != n)
                    den *= z[n] - z[m];
            z[n] -= p(z[n]) / den;
        }
    return z;
}

double closest(const std::vector<Complex>& set, Complex v)
{
    double best = 1e300;
    for (const auto& s : set)
        best = std::min(best, std::abs(s - v));
    return best;
}

double norm_error(const DiscreteState& s, const Eigen::VectorXd& theta)
{
    const Complex l2 = s.lambda * s.lambda;
    const Complex a = s.psi.transpose() * s.psi;
    const Complex b = s.psi.transpose() * theta.cast<Complex>().asDiagonal() * s.psi;
    return std::abs((1.0 - l2) * a + l2 * b - 1.0);
}

// ||Z psi|| relative to the size of the three terms of Z; ||Z(lambda_n)|| itself vanishes for N = 1.
double z_residual(const OpenLatticeModel& model, const DiscreteState& s)
{
    const auto n = static_cast<Eigen::Index>(model.n_sites());
    const Eigen::MatrixXd quad = Eigen::MatrixXd::Identity(n, n) - theta_matrix(model);
    const double scale = std::norm(s.lambda) * quad.norm() + std::abs(s.lambda) * model.dot_matrix().norm() +
                         std::sqrt(static_cast<double>(n));
    return (z_matrix(model, s.lambda) * s.psi).norm() / (scale * s.psi.norm());
}

}  // namespace

TEST_CASE("single site: analytic conjugate pair")
{
    const auto sol = solve_discrete_states(testing::m1());
    REQUIRE(sol.states.size() == 2);
    CHECK(sol.n_infinite == 0);
    const double a = 1.0 / std::sqrt(0.75);  // 1.1547005383792515
    CHECK(std::abs(sol.states[0].lambda - Complex(0.0, -a)) < 1e-12);
    CHECK(std::abs(sol.states[1].lambda - Complex(0.0, a)) < 1e-12);
    CHECK(sol.states[0].state_class == StateClass::AntiResonant);
    CHECK(sol.states[1].state_class == StateClass::Resonant);
    for (const auto& s : sol.states)
        CHECK(std::abs(s.psi(0) * s.psi(0) - 0.5) < 1e-12);
    CHECK(sol.states[0].partner_index == 1);
    CHECK(sol.states[1].partner_index == 0);
    CHECK(std::abs(sol.states[1].energy - Complex(0.0, -0.28867513459481287)) < 1e-12);
}

TEST_CASE("t-model: pole pair and two bound states")
{
    const auto sol = solve_discrete_states(testing::t_model());
    REQUIRE(sol.states.size() == 4);
    // sorted by (Re lambda, Im lambda)
    CHECK(std::abs(sol.states[0].lambda - Complex(-0.841343358148, 0.0)) < 1e-10);
    CHECK(std::abs(sol.states[1].lambda - Complex(0.502834279761, -1.216797682767)) < 1e-10);
    CHECK(std::abs(sol.states[2].lambda - Complex(0.502834279761, 1.216797682767)) < 1e-10);
    CHECK(std::abs(sol.states[3].lambda - Complex(0.685674798625, 0.0)) < 1e-10);
    CHECK(sol.states[0].state_class == StateClass::Bound);
    CHECK(sol.states[1].state_class == StateClass::AntiResonant);
    CHECK(sol.states[2].state_class == StateClass::Resonant);
    CHECK(sol.states[3].state_class == StateClass::Bound);
    CHECK(std::abs(sol.states[2].energy.imag() - (-0.514841776991)) < 1e-10);

    // independent root finder on the expanded determinant
    const auto roots = t_model_polynomial_roots();
    for (const auto& s : sol.states)
        CHECK(closest(roots, s.lambda) < 1e-10);

    // frozen bound-state vector, real and sign-fixed
    const auto& b = sol.states[0];
    CHECK(std::abs(b.psi(0) - Complex(-0.263003, 0.0)) < 1e-6);
    CHECK(std::abs(b.psi(1) - Complex(0.757428, 0.0)) < 1e-6);
}

TEST_CASE("theta = 1: all eigenvalues at infinity")
{
    const auto sol = solve_discrete_states(testing::theta_one());
    CHECK(sol.states.empty());
    CHECK(sol.n_infinite == 2);
    CHECK_FALSE(sol.complete());
    CHECK_THROWS_AS(verify_resolution_of_unity(sol), Error);
}

TEST_CASE("partially singular metric keeps the finite states")
{
    // site 1 has theta = 1, site 2 is free of leads
    ModelConfig c;
    c.n_sites = 2;
    c.epsilon = {0.2, -0.3};
    c.hoppings = {{0, 1, 0.6}};
    c.leads = {{0, 1.0, "L"}};
    const auto model = build_model(c);
    const auto sol = solve_discrete_states(model);
    CHECK(sol.n_infinite >= 1);
    CHECK(sol.states.size() + sol.n_infinite == 4);
    for (const auto& s : sol.states)
        CHECK(z_residual(model, s) <= 1e-9);
}

TEST_CASE("degenerate spectrum is refused unless allowed")
{
    // two identical decoupled sites, each with its own lead
    ModelConfig c;
    c.n_sites = 2;
    c.epsilon = {0.0, 0.0};
    c.leads = {{0, 0.5, "L"}, {1, 0.5, "R"}};
    const auto model = build_model(c);
    try {
        solve_discrete_states(model);
        FAIL("degenerate spectrum accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSpectrum);
    }
    SolveOptions opts;
    opts.allow_degenerate = true;
    const auto sol = solve_discrete_states(model, opts);
    CHECK(sol.states.size() == 4);
    CHECK_FALSE(sol.diagnostics.warnings.empty());
}

TEST_CASE("classification")
{
    CHECK(classify(0.685674) == StateClass::Bound);
    CHECK(classify(-1.5) == StateClass::AntiBound);
    CHECK(classify(Complex(0.502834, 1.21680)) == StateClass::Resonant);
    CHECK(classify(Complex(0.502834, -1.21680)) == StateClass::AntiResonant);
    CHECK(classify(Complex(0.3, 0.4)) == StateClass::Exceptional);
    CHECK(classify(Complex(0.0, 1.0)) == StateClass::Exceptional);
    CHECK(classify(1.0 + 1e-10) == StateClass::Exceptional);
    CHECK(classify(Complex(0.5, 1e-12)) == StateClass::Bound);
}

TEST_CASE("lead extension")
{
    const auto model = testing::t_model();
    const auto sol = solve_discrete_states(model);
    const auto& bound = sol.states[3];
    const Complex x1 = extend_to_lead(model, bound, 1, 1);
    const Complex x2 = extend_to_lead(model, bound, 1, 2);
    const Complex x3 = extend_to_lead(model, bound, 1, 3);
    CHECK(std::abs(x2 / x1 - bound.lambda) < 1e-14);
    CHECK(std::abs(x3 / x2 - bound.lambda) < 1e-14);
    CHECK(std::abs(x1 - bound.lambda * bound.psi(1)) < 1e-15);
    CHECK_THROWS_AS(extend_to_lead(model, bound, 2, 1), Error);

    const auto m = testing::m1();
    const auto msol = solve_discrete_states(m);
    const auto& res = msol.states[1];
    CHECK(std::abs(extend_to_lead(m, res, 0, 2) - (-2.0 / 3.0) * res.psi(0)) < 1e-12);
}

TEST_CASE("standard normalisation")
{
    const auto msol = solve_discrete_states(testing::m1());
    const auto phi = to_standard_norm(msol.states[1]);
    CHECK(std::abs(phi(0) / msol.states[1].psi(0) - std::sqrt(7.0 / 3.0)) < 1e-12);

    const auto tsol = solve_discrete_states(testing::t_model());
    const auto& bound = tsol.states[3];
    const auto pb = to_standard_norm(bound);
    const Complex scale = pb(1) / bound.psi(1);
    CHECK(scale.real() > 0.0);
    CHECK(std::abs(scale.imag()) < 1e-15);
    CHECK(pb.imag().cwiseAbs().maxCoeff() < 1e-15);

    DiscreteState edge = bound;
    edge.lambda = 1.0;
    try {
        to_standard_norm(edge);
        FAIL("lambda = 1 accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnitLambdaSquared);
    }
}

TEST_CASE("resolution of unity on the reference models")
{
    const auto m = verify_resolution_of_unity(solve_discrete_states(testing::m1()));
    CHECK(m.max_abs < 1e-14);
    const auto t = verify_resolution_of_unity(solve_discrete_states(testing::t_model()));
    CHECK(t.max_abs < 1e-10);
    CHECK(t.passed(1e-10));
}

TEST_CASE("pencil blocks")
{
    const auto model = testing::t_model();
    const QuadraticPencil pencil(model);
    CHECK((pencil.a() - pencil.a().transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pencil.b() - pencil.b().transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::MatrixXd b = pencil.b();
    b.diagonal().setZero();
    CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    // B = diag(I, Theta - I)
    CHECK(pencil.b()(0, 0) == 1.0);
    CHECK(pencil.b()(2, 2) == -1.0);
    CHECK(pencil.b()(3, 3) == 1.0);
}

TEST_CASE("property: random models")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int solved = 0;
    while (solved < 60) {
        const auto model = random_model(rng);
        SpectralSolution sol;
        try {
            sol = solve_discrete_states(model);
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::DegenerateSpectrum);
            continue;
        }
        ++solved;
        const auto n = static_cast<Eigen::Index>(model.n_sites());
        CAPTURE(solved);
        REQUIRE(sol.states.size() == static_cast<std::size_t>(2 * n));

        CHECK(verify_resolution_of_unity(sol).max_abs <= 1e-9);
        CHECK(max_abs(biorthonormality_matrix(sol) - Eigen::MatrixXcd::Identity(2 * n, 2 * n)) <= 1e-9);

        const QuadraticPencil pencil(model);
        CHECK(diagonal_relation_error(pencil, sol) <= 1e-9);
        for (std::size_t k = 0; k < sol.states.size(); ++k) {
            const auto& s = sol.states[k];
            CHECK(pencil_residual(pencil, s) <= 1e-9);
            CHECK(norm_error(s, sol.theta) <= 1e-10);
            CHECK(z_residual(model, s) <= 1e-9);
            // closed under conjugation; pairs carry exactly conjugate vectors
            const auto& p = sol.states[s.partner_index];
            CHECK(std::abs(p.lambda - std::conj(s.lambda)) <= 1e-9);
            if (s.state_class == StateClass::Resonant || s.state_class == StateClass::AntiResonant)
                CHECK((p.psi - s.psi.conjugate()).cwiseAbs().maxCoeff() <= 1e-9);
            if (s.state_class == StateClass::Bound || s.state_class == StateClass::AntiBound) {
                CHECK(s.partner_index == k);
                // real up to a global phase of 1 or i
                const bool real = s.psi.imag().cwiseAbs().maxCoeff() <= 1e-12;
                const bool imaginary = s.psi.real().cwiseAbs().maxCoeff() <= 1e-12;
                CHECK((real || imaginary));
            }
        }

        // X (A - l B) Y1 = diag(Z, I) = Y2 (A - l B) X
        for (int r = 0; r < 10; ++r) {
            const Complex lambda = std::polar(0.2 + 2.5 * u(rng), 6.283185307179586 * u(rng));
            const Eigen::MatrixXcd pen = pencil.a().cast<Complex>() - lambda * pencil.b().cast<Complex>();
            Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
            target.topLeftCorner(n, n) = z_matrix(model, lambda);
            CHECK(max_abs(pencil.x_factor(lambda) * pen * pencil.y1_factor(lambda) - target) <= 1e-12 * (1.0 + std::norm(lambda)));
            CHECK(max_abs(pencil.y2_factor(lambda) * pen * pencil.x_factor(lambda) - target) <= 1e-12 * (1.0 + std::norm(lambda)));
        }
    }
}

TEST_CASE("property: block identity at 100 random lambda")
{
    const auto model = testing::t_model();
    const QuadraticPencil pencil(model);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int r = 0; r < 100; ++r) {
        const Complex lambda(u(rng), u(rng));
        const Eigen::MatrixXcd pen = pencil.a().cast<Complex>() - lambda * pencil.b().cast<Complex>();
        Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(4, 4);
        target.topLeftCorner(2, 2) = pencil.z(lambda);
        CHECK(max_abs(pencil.x_factor(lambda) * pen * pencil.y1_factor(lambda) - target) <= 1e-12);
    }
}

TEST_CASE("diagnostics are filled")
{
    const auto sol = solve_discrete_states(testing::t_model());
    CHECK(sol.diagnostics.max_pencil_residual < 1e-12);
    CHECK(sol.diagnostics.max_biorthonormality_error < 1e-12);
    CHECK(sol.diagnostics.min_relative_gap > 1e-3);
    CHECK(sol.diagnostics.warnings.empty());
}
