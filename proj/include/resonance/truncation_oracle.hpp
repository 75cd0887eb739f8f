#pragma once

#include "resonance/greens_function.hpp"

#include <memory>

namespace resonance {

// Dot plus every lead cut off by a hard wall after site L.
class TruncatedSystem {
public:
    TruncatedSystem(const OpenLatticeModel& model, int lead_length);

    int lead_length() const noexcept { return lead_length_; }
    std::size_t n_dot() const noexcept { return n_dot_; }
    std::size_t n_leads() const noexcept { return n_leads_; }
    Eigen::Index dimension() const noexcept { return hamiltonian_.rows(); }
    const Eigen::MatrixXd& hamiltonian() const noexcept { return hamiltonian_; }

    // Row of a site; lead sites need 1 <= x <= L.
    Eigen::Index row(const SiteRef& site) const;

private:
    int lead_length_;
    std::size_t n_dot_;
    std::size_t n_leads_;
    Eigen::MatrixXd hamiltonian_;
};

TruncatedSystem truncate(const OpenLatticeModel& model, int lead_length);

// Eigendecomposition of a truncated system, computed once.
class ExactPropagator {
public:
    explicit ExactPropagator(TruncatedSystem system);

    const TruncatedSystem& system() const noexcept { return system_; }
    const Eigen::VectorXd& energies() const noexcept { return energies_; }

    // Largest |t| before wall reflections reach lead site x (0 for dot-only probes).
    double horizon(int farthest_probe) const noexcept;

    // e^{-iHt} applied to a full-lattice vector; no horizon check.
    Eigen::VectorXcd evolve(const Eigen::VectorXcd& initial, double t) const;
    Eigen::VectorXcd evolve_site(const SiteRef& source, double t) const;

    // <sink| e^{-iHt} |source>, with the horizon check for the farther lead site.
    Complex amplitude(const SiteRef& sink, const SiteRef& source, double t) const;

    // (E - H)^-1 element for complex E off the real axis.
    Complex resolvent(const SiteRef& a, const SiteRef& b, Complex energy) const;

private:
    TruncatedSystem system_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
};

// Fields of e^{-iHt}|source> on every site at each time.
std::vector<Eigen::VectorXcd> exact_propagate(const ExactPropagator& propagator, const SiteRef& source,
                                              const std::vector<double>& times, int farthest_probe);

void check_horizon(const ExactPropagator& propagator, double t, int farthest_probe);

// Roots of det Z(lambda), found from the characteristic polynomial.
struct DeterminantRoots {
    std::vector<Complex> roots;
    Eigen::VectorXcd coefficients;  // ascending powers, after the degree drop
    double condition_estimate = 0.0;
};

DeterminantRoots det_z_roots(const OpenLatticeModel& model);

// det Z via LU factorisation.
Complex det_z(const OpenLatticeModel& model, Complex lambda);

// Largest relative mismatch after greedy nearest matching; infinity if sizes differ.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b);

}  // namespace resonance
