#pragma once

#include "resonance/spectral_core.hpp"

namespace resonance {

// A site of the full lattice: a dot site, or site x >= 1 on a lead.
struct SiteRef {
    enum class Kind { Dot, Lead };

    Kind kind = Kind::Dot;
    std::size_t index = 0;  // zero-based dot index, or lead index
    int x = 0;

    static SiteRef dot(std::size_t i) { return {Kind::Dot, i, 0}; }
    static SiteRef lead(std::size_t a, int x) { return {Kind::Lead, a, x}; }

    bool is_dot() const noexcept { return kind == Kind::Dot; }
    bool operator==(const SiteRef&) const = default;
};

// Dot site that `site` couples through, and the factor c with <site|G|.> = c <dot|G_eff|.>.
struct DotProjection {
    std::size_t dot_site;
    Complex factor;
};

DotProjection project_to_dot(const OpenLatticeModel& model, const SiteRef& site, Complex lambda);

// (E - H_eff)^-1 = -lambda Z^-1.
Eigen::MatrixXcd g_eff_direct(const OpenLatticeModel& model, const SheetPoint& point);

// sum_n psi_n lambda lambda_n / (lambda - lambda_n) psi_n^T.
Eigen::MatrixXcd g_eff_expanded(const SpectralSolution& solution, const SheetPoint& point);

// Single element of the expansion.
Complex g_eff_expanded_element(const SpectralSolution& solution, Complex lambda, std::size_t i, std::size_t j);

// sum_n phi_n phi_n^T / (E - E_n) for E inside the band; equals G_eff(e^{ik}) + G_eff(e^{-ik}).
Eigen::MatrixXcd g_retarded_advanced_sum(const SpectralSolution& solution, double energy);

// Retarded sheet point on the band: lambda = e^{ik}, k in (0, pi).
SheetPoint retarded_point(double energy);

enum class LeadBoundary { Reject, Allow };

// Free semi-infinite lead: -(lambda^{x+y} - lambda^{|x-y|}) / (lambda - 1/lambda).
// With LeadBoundary::Allow, |lambda| = 1 is accepted as the boundary value.
Complex lead_green_element(const SheetPoint& point, int x, int y, LeadBoundary boundary = LeadBoundary::Reject);

Complex full_green_element(const OpenLatticeModel& model, const SpectralSolution& solution,
                           const SheetPoint& point, const SiteRef& a, const SiteRef& b,
                           LeadBoundary boundary = LeadBoundary::Reject);

// Same element from direct inversion of Z; no spectral data needed.
Complex full_green_element_direct(const OpenLatticeModel& model, const SheetPoint& point, const SiteRef& a,
                                  const SiteRef& b, LeadBoundary boundary = LeadBoundary::Reject);

// Landauer transmission lead_in -> lead_out at band energy E (Fisher-Lee form).
double transmission(const OpenLatticeModel& model, double energy, std::size_t lead_in, std::size_t lead_out);

// |r|^2 for a wave sent in on `lead`.
double reflection(const OpenLatticeModel& model, double energy, std::size_t lead);

}  // namespace resonance
