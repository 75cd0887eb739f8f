#pragma once

#include "resonance/packet.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iosfwd>
#include <string>

namespace kit {

using resonance::Complex;

// Round-trip decimal, 17 significant digits.
std::string num(double value);

// stdout when path is empty or "-".
class OutputFile {
public:
    explicit OutputFile(const std::string& path);
    std::ostream& stream() { return file_.is_open() ? file_ : *console_; }

private:
    std::ofstream file_;
    std::ostream* console_;
};

nlohmann::json complex_json(Complex z);

void write_spectrum_csv(std::ostream& out, const resonance::OpenLatticeModel& model,
                        const resonance::SpectralSolution& solution);
nlohmann::json spectrum_json(const resonance::OpenLatticeModel& model, const resonance::SpectralSolution& solution);

void write_amplitude_csv(std::ostream& out, const resonance::AmplitudeSeries& series, bool groups);
nlohmann::json amplitude_json(const resonance::AmplitudeSeries& series, bool groups);

// Components are written in `order` (total first, then each named entry present in the frame).
void write_packet_csv(std::ostream& out, const resonance::OpenLatticeModel& model,
                      const std::vector<resonance::PacketFrame>& frames, const std::vector<std::string>& order);
nlohmann::json packet_json(const resonance::OpenLatticeModel& model, const std::vector<resonance::PacketFrame>& frames,
                           const std::vector<std::string>& order);

// Normalisation residual |(1 - l^2) psi.psi + l^2 psi.Theta.psi - 1|.
double norm_residual(const resonance::DiscreteState& state, const Eigen::VectorXd& theta);

}  // namespace kit
