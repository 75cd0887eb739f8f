#pragma once

#include "resonance/band_quadrature.hpp"
#include "resonance/truncation_oracle.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace resonance {

enum class Method { Quadrature, Poles, Oracle };

std::string_view to_string(Method m) noexcept;

// Long-time pieces of an amplitude. res: resonant poles (t > 0); ar: anti-resonant poles (t < 0);
// bound_ab: real-lambda poles; branch: band-edge t^{-3/2} terms; plane: incoming plane wave (escape in k).
struct TermGroups {
    std::vector<Complex> res;
    std::vector<Complex> ar;
    std::vector<Complex> bound_ab;
    std::vector<Complex> branch;
    std::vector<Complex> plane;

    static constexpr std::array<std::string_view, 5> names{"res", "ar", "bound_ab", "branch", "plane"};
    const std::vector<Complex>& by_name(std::string_view name) const;
};

struct AmplitudeSeries {
    std::vector<double> times;
    std::vector<Complex> values;
    Method method = Method::Quadrature;
    std::optional<TermGroups> groups;
    std::vector<std::string> warnings;
};

// <d_j| e^{-iHt} |d_i>.
AmplitudeSeries survival_amplitude_quadrature(const OpenLatticeModel& model, const SpectralSolution& solution,
                                              std::size_t i, std::size_t j, const std::vector<double>& times,
                                              const QuadratureOptions& options = {});

AmplitudeSeries survival_amplitude_poles(const SpectralSolution& solution, std::size_t i, std::size_t j,
                                         const std::vector<double>& times);

AmplitudeSeries survival_amplitude_oracle(const ExactPropagator& propagator, std::size_t i, std::size_t j,
                                          const std::vector<double>& times);

// <x on lead| e^{-iHt} |d_i>.
AmplitudeSeries escaping_amplitude_x_quadrature(const OpenLatticeModel& model, const SpectralSolution& solution,
                                                std::size_t lead, int x, std::size_t i,
                                                const std::vector<double>& times,
                                                const QuadratureOptions& options = {});

AmplitudeSeries escaping_amplitude_x_poles(const OpenLatticeModel& model, const SpectralSolution& solution,
                                           std::size_t lead, int x, std::size_t i, const std::vector<double>& times);

AmplitudeSeries escaping_amplitude_x_oracle(const ExactPropagator& propagator, std::size_t lead, int x,
                                            std::size_t i, const std::vector<double>& times);

// <k on lead| e^{-iHt} |d_i> with <x|k> = sqrt(2) sin(kx).
AmplitudeSeries escaping_amplitude_k_quadrature(const OpenLatticeModel& model, const SpectralSolution& solution,
                                                std::size_t lead, double k, std::size_t i,
                                                const std::vector<double>& times,
                                                const QuadratureOptions& options = {});

AmplitudeSeries escaping_amplitude_k_poles(const OpenLatticeModel& model, const SpectralSolution& solution,
                                           std::size_t lead, double k, std::size_t i, const std::vector<double>& times);

// Uses the spectrum only to size the summation window.
AmplitudeSeries escaping_amplitude_k_oracle(const ExactPropagator& propagator, const SpectralSolution& solution,
                                            std::size_t lead, double k, std::size_t i,
                                            const std::vector<double>& times);

// Lead sites summed in the k projection at time t.
int escape_window(const SpectralSolution& solution, double t);

// Free semi-infinite lead: int dk/2pi 2 sin(kx) sin(kx') e^{2it cos k}.
Complex free_lead_propagator(int x, int x_prime, double t);

// Real lambda within 3/sqrt|t| of +-1 makes the saddle evaluation unreliable.
std::optional<std::string> saddle_overlap_warning(const SpectralSolution& solution, double t);

}  // namespace resonance
