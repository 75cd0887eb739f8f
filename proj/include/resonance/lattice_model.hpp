#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace resonance {

using Complex = std::complex<double>;

// Lead hopping is the energy unit; lead sites are x = 1, 2, ... counted from the dot.
struct LeadAttachment {
    std::size_t site = 0;  // zero-based dot index
    double coupling = 0.0;
    std::string label;
};

struct Hopping {
    std::size_t i = 0;  // zero-based
    std::size_t j = 0;
    double t = 0.0;
};

// Unvalidated description. Either `dot_matrix` or `epsilon` + `hoppings` is used.
struct ModelConfig {
    std::size_t n_sites = 0;
    std::vector<double> epsilon;
    std::vector<Hopping> hoppings;
    std::optional<Eigen::MatrixXd> dot_matrix;
    std::vector<LeadAttachment> leads;
};

class OpenLatticeModel {
public:
    // Validates: exact symmetry after a 1e-12 check, site indices in range, at least one lead.
    OpenLatticeModel(Eigen::MatrixXd dot_matrix, std::vector<LeadAttachment> leads);

    std::size_t n_sites() const noexcept { return static_cast<std::size_t>(dot_matrix_.rows()); }
    const Eigen::MatrixXd& dot_matrix() const noexcept { return dot_matrix_; }
    const std::vector<LeadAttachment>& leads() const noexcept { return leads_; }
    std::size_t n_leads() const noexcept { return leads_.size(); }

    const LeadAttachment& lead(std::size_t index) const;
    std::optional<std::size_t> find_lead(std::string_view label) const;

    // Sum of squared couplings per site.
    const Eigen::VectorXd& theta_diagonal() const noexcept { return theta_; }

private:
    Eigen::MatrixXd dot_matrix_;
    std::vector<LeadAttachment> leads_;
    Eigen::VectorXd theta_;
};

OpenLatticeModel build_model(const ModelConfig& config);

Eigen::MatrixXd theta_matrix(const OpenLatticeModel& model);

// A point on the two-sheeted energy surface, parametrised by lambda = exp(ik).
struct SheetPoint {
    Complex lambda;
    Complex k;
    Complex energy;

    static SheetPoint from_lambda(Complex lambda);
};

enum class Sheet { First, Second };

Complex energy_of(Complex lambda);

SheetPoint lambda_from_energy(Complex energy, Sheet sheet);

// H_d - lambda * Theta.
Eigen::MatrixXcd effective_hamiltonian(const OpenLatticeModel& model, const SheetPoint& point);

// lambda^2 (I - Theta) + lambda H_d + I; vanishes on discrete states.
Eigen::MatrixXcd z_matrix(const OpenLatticeModel& model, Complex lambda);

// dZ/dlambda.
Eigen::MatrixXcd z_derivative(const OpenLatticeModel& model, Complex lambda);

}  // namespace resonance
