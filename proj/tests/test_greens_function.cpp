#include "support.hpp"

#include "resonance/error.hpp"
#include "resonance/greens_function.hpp"
#include "resonance/random_model.hpp"
#include "resonance/truncation_oracle.hpp"

#include <doctest.h>

#include <random>

using namespace resonance;
using testing::max_abs;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidInput;
}

// Bare hard-wall chain of `length` sites with hopping -1, resolvent at E.
Eigen::MatrixXcd chain_resolvent(int length, Complex energy)
{
    Eigen::MatrixXcd m = energy * Eigen::MatrixXcd::Identity(length, length);
    for (int x = 0; x + 1 < length; ++x) {
        m(x, x + 1) = 1.0;
        m(x + 1, x) = 1.0;
    }
    return m.inverse();
}

Eigen::MatrixXcd full_resolvent(const TruncatedSystem& sys, Complex energy)
{
    const auto n = sys.dimension();
    const Eigen::MatrixXcd m = energy * Eigen::MatrixXcd::Identity(n, n) - sys.hamiltonian().cast<Complex>();
    return m.partialPivLu().inverse();
}

OpenLatticeModel perfect_chain()
{
    ModelConfig c;
    c.n_sites = 1;
    c.epsilon = {0.0};
    c.leads = {{0, 1.0, "L"}, {0, 1.0, "R"}};
    return build_model(c);
}

}  // namespace

TEST_CASE("single site: direct and expanded agree with the closed form")
{
    const auto model = testing::m1();
    const auto sol = solve_discrete_states(model);
    const auto p = SheetPoint::from_lambda(0.5);
    const Complex expected = 1.0 / (-2.5 + 0.125);  // -0.42105263157894735
    CHECK(std::abs(g_eff_direct(model, p)(0, 0) - expected) < 1e-15);
    CHECK(std::abs(g_eff_expanded(sol, p)(0, 0) - expected) < 1e-14);
    // two-pole sum collapses to -l a^2 / (l^2 + a^2), a^2 = 4/3
    const Complex l = 0.5;
    CHECK(std::abs(-l * (4.0 / 3.0) / (l * l + 4.0 / 3.0) - expected) < 1e-15);
    CHECK(std::abs(g_eff_expanded_element(sol, 0.5, 0, 0) - expected) < 1e-14);

    CHECK(max_abs(g_eff_expanded(sol, SheetPoint{0.0, 0.0, 0.0})) == 0.0);
    CHECK(max_abs(g_eff_direct(model, SheetPoint{0.0, 0.0, 0.0})) == 0.0);

    const auto pole = SheetPoint::from_lambda(sol.states[1].lambda);
    CHECK(code_of([&] { g_eff_direct(model, pole); }) == ErrorCode::SingularAtPole);
    CHECK(code_of([&] { g_eff_expanded(sol, pole); }) == ErrorCode::PoleHit);
}

TEST_CASE("t-model: direct inversion equals -lambda Z^-1 and the explicit 2x2 inverse")
{
    const auto model = testing::t_model();
    const Complex l = 0.3;
    const auto g = g_eff_direct(model, SheetPoint::from_lambda(l));
    const Eigen::MatrixXcd ref = -l * z_matrix(model, l).inverse();
    CHECK(max_abs(g - ref) < 1e-14);
    // (E - H_eff)^-1 by hand: E = -l - 1/l, H_eff = [[-0.85, -1], [-1, -2 l]]
    const Complex e = -l - 1.0 / l;
    const Complex a = e + 0.85;
    const Complex d = e + 2.0 * l;
    const Complex det = a * d - 1.0;
    CHECK(std::abs(g(0, 0) - d / det) < 1e-14);
    CHECK(std::abs(g(0, 1) + 1.0 / det) < 1e-14);
    CHECK(std::abs(g(1, 1) - a / det) < 1e-14);
}

TEST_CASE("retarded plus advanced identity")
{
    const auto m = testing::m1();
    const auto msol = solve_discrete_states(m);
    const auto sum = g_retarded_advanced_sum(msol, 0.0);
    const Eigen::MatrixXcd direct = g_eff_direct(m, SheetPoint::from_lambda(Complex(0.0, -1.0))) +
                        g_eff_direct(m, SheetPoint::from_lambda(Complex(0.0, 1.0)));
    CHECK(max_abs(sum - direct) < 1e-14);
    CHECK(std::abs(sum(0, 0).imag()) < 1e-14);

    CHECK(code_of([&] { g_retarded_advanced_sum(msol, 2.0); }) == ErrorCode::BandEdge);
    CHECK(code_of([&] { g_retarded_advanced_sum(msol, -2.0); }) == ErrorCode::BandEdge);
    CHECK(code_of([&] { retarded_point(2.5); }) == ErrorCode::BandEdge);

    const auto t = testing::t_model();
    const auto tsol = solve_discrete_states(t);
    const auto r = retarded_point(0.5);
    CHECK(r.lambda.imag() > 0.0);
    CHECK(std::abs(r.energy - 0.5) < 1e-15);
    const Eigen::MatrixXcd rhs = g_eff_direct(t, r) + g_eff_direct(t, SheetPoint::from_lambda(std::conj(r.lambda)));
    CHECK(max_abs(g_retarded_advanced_sum(tsol, 0.5) - rhs) < 1e-9);
}

TEST_CASE("property: expansion and identity on random models")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int done = 0;
    while (done < 25) {
        const auto model = random_model(rng);
        SpectralSolution sol;
        try {
            sol = solve_discrete_states(model);
        } catch (const Error&) {
            continue;
        }
        ++done;
        for (int r = 0; r < 50; ++r) {
            const Complex l = std::polar(0.1 + 2.9 * u(rng), 6.283185307179586 * u(rng));
            bool near = false;
            for (const auto& s : sol.states)
                near = near || std::abs(l - s.lambda) < 1e-3;
            if (near)
                continue;
            const auto p = SheetPoint::from_lambda(l);
            const auto direct = g_eff_direct(model, p);
            CHECK(max_abs(g_eff_expanded(sol, p) - direct) < 1e-9);
            CHECK(max_abs(direct - direct.transpose()) < 1e-12 * (1.0 + max_abs(direct)));
        }
        for (int r = 0; r < 20; ++r) {
            const double e = -1.98 + 3.96 * u(rng);
            const auto rp = retarded_point(e);
            const Eigen::MatrixXcd rhs =
                g_eff_direct(model, rp) + g_eff_direct(model, SheetPoint::from_lambda(std::conj(rp.lambda)));
            CHECK(max_abs(g_retarded_advanced_sum(sol, e) - rhs) < 1e-9);
        }
    }
}

TEST_CASE("free lead closed form")
{
    const auto p = SheetPoint::from_lambda(0.5);
    CHECK(std::abs(lead_green_element(p, 1, 1) - (-0.5)) < 1e-15);
    CHECK(std::abs(lead_green_element(p, 3, 1) - (-0.125)) < 1e-15);
    CHECK(std::abs(lead_green_element(p, 1, 3) - (-0.125)) < 1e-15);

    const auto chain = chain_resolvent(200, p.energy);
    double worst = 0.0;
    for (int x = 1; x <= 12; ++x)
        for (int y = 1; y <= 12; ++y)
            worst = std::max(worst, std::abs(lead_green_element(p, x, y) - chain(x - 1, y - 1)));
    CHECK(worst < 1e-10);

    const auto complex_point = SheetPoint::from_lambda(Complex(0.3, 0.5));
    const auto chain2 = chain_resolvent(200, complex_point.energy);
    CHECK(std::abs(lead_green_element(complex_point, 4, 7) - chain2(3, 6)) < 1e-10);

    CHECK(code_of([] { lead_green_element(SheetPoint::from_lambda(Complex(0.0, 1.0)), 1, 1); }) ==
          ErrorCode::UnitCircleLambda);
    CHECK(code_of([] { lead_green_element(SheetPoint::from_lambda(1.5), 1, 1); }) == ErrorCode::UnitCircleLambda);
    CHECK(std::isfinite(std::abs(
        lead_green_element(SheetPoint::from_lambda(std::polar(1.0, 0.7)), 2, 3, LeadBoundary::Allow))));
}

TEST_CASE("full lattice elements")
{
    const auto model = testing::t_model();
    const auto sol = solve_discrete_states(model);
    const auto p = SheetPoint::from_lambda(0.4);
    const auto g = g_eff_expanded(sol, p);

    CHECK(std::abs(full_green_element(model, sol, p, SiteRef::dot(0), SiteRef::dot(1)) - g(0, 1)) < 1e-15);
    // lead R, x = 1 to dot 1
    CHECK(std::abs(full_green_element(model, sol, p, SiteRef::lead(1, 1), SiteRef::dot(0)) - 1.0 * 0.4 * g(1, 0)) <
          1e-14);

    const auto sys = truncate(model, 300);
    const auto oracle = full_resolvent(sys, p.energy);
    const std::vector<SiteRef> sites{SiteRef::dot(0), SiteRef::dot(1), SiteRef::lead(0, 1), SiteRef::lead(0, 4),
                                     SiteRef::lead(1, 2), SiteRef::lead(1, 9)};
    double worst = 0.0;
    for (const auto& a : sites)
        for (const auto& b : sites) {
            const Complex v = full_green_element(model, sol, p, a, b);
            worst = std::max(worst, std::abs(v - oracle(sys.row(a), sys.row(b))));
            CHECK(std::abs(v - full_green_element(model, sol, p, b, a)) < 1e-14);
            CHECK(std::abs(v - full_green_element_direct(model, p, a, b)) < 1e-13);
        }
    CHECK(worst < 1e-8);

    // complex lambda inside the disk, same comparison
    const auto q = SheetPoint::from_lambda(Complex(-0.2, 0.55));
    const auto oracle_q = full_resolvent(sys, q.energy);
    const Complex v = full_green_element(model, sol, q, SiteRef::lead(0, 3), SiteRef::lead(0, 5));
    CHECK(std::abs(v - oracle_q(sys.row(SiteRef::lead(0, 3)), sys.row(SiteRef::lead(0, 5)))) < 1e-8);

    CHECK(code_of([&] { full_green_element(model, sol, SheetPoint::from_lambda(2.0), SiteRef::lead(0, 1),
                                           SiteRef::dot(0)); }) == ErrorCode::UnitCircleLambda);
    // next to a pole the direct fallback takes over
    const auto near = SheetPoint::from_lambda(sol.states[3].lambda * (1.0 + 1e-9));
    CHECK(std::isfinite(std::abs(full_green_element(model, sol, near, SiteRef::dot(0), SiteRef::dot(1)))));
}

TEST_CASE("transmission")
{
    const auto chain = perfect_chain();
    for (const double e : {-1.9, -1.0, 0.0, 0.7, 1.5})
        CHECK(transmission(chain, e, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));

    const auto model = testing::t_model();
    for (double e = -1.95; e < 1.96; e += 0.05) {
        const double t = transmission(model, e, 0, 1);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0 + 1e-12);
        CHECK(std::abs(t - transmission(model, e, 1, 0)) < 1e-14);
        CHECK(std::abs(t + reflection(model, e, 0) - 1.0) < 1e-12);
    }
    // direct inversion at E = 0: G_22 at lambda = i
    const auto g = g_eff_direct(model, retarded_point(0.0));
    CHECK(std::abs(transmission(model, 0.0, 0, 1) - 4.0 * std::norm(g(1, 1))) < 1e-14);
    CHECK(transmission(model, 0.0, 0, 1) == doctest::Approx(0.7429305912596401).epsilon(1e-12));

    CHECK(transmission(model, -2.0 + 1e-7, 0, 1) < 1e-5);
    CHECK(transmission(model, 2.0 - 1e-7, 0, 1) < 1e-5);
    CHECK(code_of([&] { transmission(model, 2.0, 0, 1); }) == ErrorCode::BandEdge);
}
