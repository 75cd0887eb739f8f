#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kit {

struct GlobalOptions {
    double tol = 1e-9;
    int jobs = 1;
    std::string out;
    std::string format = "csv";
};

struct SpectrumArgs {
    std::string model;
    bool allow_warnings = false;
};

struct VerifyArgs {
    std::string model;
    int random = 0;
    int n_sites = 0;
    std::uint64_t seed = 1;
};

struct GreensArgs {
    std::string model;
    std::vector<std::string> elements;
    std::string energies;
    std::string lambdas;
    std::string transmission;
};

struct SurvivalArgs {
    std::string model;
    int i = 1;
    int j = 1;
    std::string times;
    std::string method = "quadrature";
    bool groups = false;
    int lead_length = 600;
};

struct EscapeArgs {
    std::string model;
    std::string lead;
    std::optional<int> x;
    std::optional<double> k;
    int i = 1;
    std::string times;
    std::string method = "quadrature";
    bool groups = false;
    int lead_length = 600;
};

struct PacketArgs {
    std::string model;
    std::string lead = "L";
    double x0 = 40.0;
    double width = 10.0;
    double k0 = 0.0;
    int x_max = 200;
    std::string times;
    std::string method = "quadrature";
    bool components = false;
    int lead_length = 800;
};

// Each returns the process exit code; errors propagate as resonance::Error.
int run_spectrum(const GlobalOptions& g, const SpectrumArgs& args);
int run_verify(const GlobalOptions& g, const VerifyArgs& args);
int run_greens(const GlobalOptions& g, const GreensArgs& args);
int run_survival(const GlobalOptions& g, const SurvivalArgs& args);
int run_escape(const GlobalOptions& g, const EscapeArgs& args);
int run_packet(const GlobalOptions& g, const PacketArgs& args);

}  // namespace kit
