#pragma once

#include "resonance/greens_function.hpp"

#include <vector>

namespace resonance {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    std::size_t max_nodes = std::size_t{1} << 20;
};

// What e^{-iHt} acts on: one dot site, or a profile phi(x'), x' = 1..size, on one lead.
struct FieldSource {
    enum class Kind { Dot, LeadProfile };

    Kind kind = Kind::Dot;
    std::size_t index = 0;  // dot site or lead
    Eigen::VectorXcd profile;

    static FieldSource dot(std::size_t i);
    static FieldSource lead_profile(std::size_t lead, Eigen::VectorXcd profile);
};

// Sites where the field is wanted: all dot sites (optional) and x = 1..extent[a] on each lead.
struct FieldLayout {
    bool dots = true;
    std::vector<int> lead_extent;

    Eigen::Index size(std::size_t n_dot) const;
    // Offset of lead a's x = 1 entry.
    Eigen::Index lead_offset(std::size_t n_dot, std::size_t lead) const;
    int max_extent() const;
};

// e^{-iHt} source on the layout. components[0] is the free-lead term, components[1 + n] belongs to state n.
struct FieldResult {
    Eigen::VectorXcd total;
    std::vector<Eigen::VectorXcd> components;
    std::size_t nodes = 0;
    double error_estimate = 0.0;
};

// Exact contour evaluation: periodic trapezoid on |lambda| = 1 plus residues of poles inside the disk,
// refined by node doubling until successive results agree to abs_tol.
FieldResult propagate_field(const OpenLatticeModel& model, const SpectralSolution& solution,
                            const FieldSource& source, const FieldLayout& layout, double t,
                            const QuadratureOptions& options, bool want_components = false);

// Smallest |log|lambda_n||; the trapezoid converges like exp(-M * this).
double unit_circle_distance(const SpectralSolution& solution);

std::size_t starting_node_count(const SpectralSolution& solution, double t, int harmonic_extent);

}  // namespace resonance
