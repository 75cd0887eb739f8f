#pragma once

#include "resonance/time_evolution.hpp"

#include <map>
#include <string>
#include <vector>

namespace resonance {

// A exp(-(x - x0)^2 / width^2) exp(i k0 x) on lead sites x >= 1, normalised on [1, x_max].
struct GaussianPacket {
    std::string lead_label = "L";
    double x0 = 40.0;
    double width = 10.0;
    double k0 = 0.0;

    Eigen::VectorXcd profile(int x_max) const;
};

// Amplitudes on the dot sites and on x = 1..x_max of every lead.
struct LatticeField {
    Eigen::VectorXcd dot;
    std::vector<Eigen::VectorXcd> leads;  // leads[a](x - 1)

    double norm_squared() const;
    double max_abs_difference(const LatticeField& other) const;
};

struct PacketFrame {
    double time = 0.0;
    LatticeField total;
    // "free" plus one entry per discrete state, named by class and rank (res1, ar1, bound1, ...).
    std::map<std::string, LatticeField> components;
};

// Component names in state order; entry n names state n.
std::vector<std::string> component_names(const SpectralSolution& solution);

std::size_t packet_lead(const OpenLatticeModel& model, const GaussianPacket& packet);

std::vector<PacketFrame> packet_evolve(const OpenLatticeModel& model, const SpectralSolution& solution,
                                       const GaussianPacket& packet, const std::vector<double>& times, int x_max,
                                       const QuadratureOptions& options = {}, bool with_components = false);

// Contribution of state n alone.
LatticeField packet_component(const OpenLatticeModel& model, const SpectralSolution& solution, std::size_t n,
                              const GaussianPacket& packet, double time, int x_max,
                              const QuadratureOptions& options = {});

std::vector<PacketFrame> packet_evolve_oracle(const ExactPropagator& propagator, const OpenLatticeModel& model,
                                              const GaussianPacket& packet, const std::vector<double>& times,
                                              int x_max);

// Complex conjugation of every amplitude.
LatticeField time_invert(LatticeField field);

// <x on lead| e^{-iHt} |d_i> alongside <x on lead| e^{-iH(t - t0)} |d_i>, the second being the
// evolution of the conjugated state e^{-iH t0}|d_i> started at t = 0.
struct ReabsorptionSeries {
    int x = 0;
    AmplitudeSeries direct;
    AmplitudeSeries inverted;
    AmplitudeSeries direct_poles;    // times with t != 0
    AmplitudeSeries inverted_poles;  // times with t != t0
};

std::vector<ReabsorptionSeries> reabsorption_experiment(const OpenLatticeModel& model,
                                                        const SpectralSolution& solution, std::size_t lead,
                                                        std::size_t source, double t0, const std::vector<int>& xs,
                                                        const std::vector<double>& times,
                                                        const QuadratureOptions& options = {});

// Largest gap between the two-step oracle evolution (evolve t0, conjugate, evolve t) and direct
// evolution over t - t0, on the given lead sites.
double time_inversion_identity_error(const ExactPropagator& propagator, std::size_t lead, std::size_t source,
                                     double t0, const std::vector<int>& xs, const std::vector<double>& times);

}  // namespace resonance
