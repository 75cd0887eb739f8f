#pragma once

#include "resonance/lattice_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace resonance {

enum class StateClass { Bound, AntiBound, Resonant, AntiResonant, Exceptional };

std::string_view to_string(StateClass c) noexcept;

// Linearisation of Z(lambda) psi = 0 acting on (psi, lambda psi).
class QuadraticPencil {
public:
    explicit QuadraticPencil(const OpenLatticeModel& model);

    const Eigen::MatrixXd& a() const noexcept { return a_; }
    const Eigen::MatrixXd& b() const noexcept { return b_; }
    Eigen::MatrixXcd z(Complex lambda) const;

    // X (A - lambda B) Y1 = diag(Z, I) and Y2 (A - lambda B) X = diag(Z, I).
    Eigen::MatrixXcd x_factor(Complex lambda) const;
    Eigen::MatrixXcd y1_factor(Complex lambda) const;
    Eigen::MatrixXcd y2_factor(Complex lambda) const;

private:
    Eigen::MatrixXd hd_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd a_;
    Eigen::MatrixXd b_;
};

struct DiscreteState {
    Complex lambda;
    Complex k;
    Complex energy;
    StateClass state_class = StateClass::Exceptional;
    // Dot-space right vector; the left vector is its plain transpose.
    Eigen::VectorXcd psi;
    std::size_t partner_index = 0;
};

struct SpectralDiagnostics {
    double max_pencil_residual = 0.0;
    double max_relative_z_residual = 0.0;
    double max_biorthonormality_error = 0.0;
    double min_relative_gap = 0.0;
    std::vector<std::string> warnings;
};

struct SpectralSolution {
    std::vector<DiscreteState> states;  // sorted by (Re lambda, Im lambda)
    std::size_t n_infinite = 0;
    Eigen::VectorXd theta;
    SpectralDiagnostics diagnostics;

    std::size_t n_sites() const noexcept { return static_cast<std::size_t>(theta.size()); }
    bool complete() const noexcept { return n_infinite == 0; }
};

StateClass classify(Complex lambda);

struct SolveOptions {
    // Keep going past the degeneracy gate; the gap is still reported in the diagnostics.
    bool allow_degenerate = false;
};

SpectralSolution solve_discrete_states(const OpenLatticeModel& model, const SolveOptions& options = {});

// t_{i alpha} lambda^x <d_i|psi> for lead site x >= 1.
Complex extend_to_lead(const OpenLatticeModel& model, const DiscreteState& state, std::size_t lead, int x);

// sqrt(1 - lambda^2) psi, principal branch.
Eigen::VectorXcd to_standard_norm(const DiscreteState& state);

struct UnityReport {
    Eigen::MatrixXcd residual;  // sum psi psi^T - I
    double max_abs = 0.0;
    bool passed(double tol) const noexcept { return max_abs <= tol; }
};

UnityReport verify_resolution_of_unity(const SpectralSolution& solution);

// (1 - l_m l_n) psi_m^T psi_n + l_m l_n psi_m^T Theta psi_n.
Eigen::MatrixXcd biorthonormality_matrix(const SpectralSolution& solution);

// |(A - lambda B) Psi| with Psi = (psi, lambda psi).
double pencil_residual(const QuadraticPencil& pencil, const DiscreteState& state);

// max_n |Psi_n^T A Psi_n - lambda_n|.
double diagonal_relation_error(const QuadraticPencil& pencil, const SpectralSolution& solution);

}  // namespace resonance
