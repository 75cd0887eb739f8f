#include "commands.hpp"

#include "resonance/error.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_input = 2;

int default_jobs()
{
    if (const char* env = std::getenv("RESONANCE_KIT_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::logic_error&) {
        }
    }
    return 1;
}

nlohmann::json collect_params(const CLI::App& command)
{
    nlohmann::json params = nlohmann::json::object();
    for (const CLI::Option* opt : command.get_options()) {
        if (opt->get_name() == "--help" || opt->count() == 0)
            continue;
        const auto& values = opt->results();
        std::string name = opt->get_name();
        while (!name.empty() && name.front() == '-')
            name.erase(name.begin());
        if (opt->get_type_size() == 0)
            params[name] = true;
        else if (values.size() == 1)
            params[name] = values.front();
        else
            params[name] = values;
    }
    return params;
}

void write_manifest(const kit::GlobalOptions& g, const CLI::App& command, const std::string& model, int argc,
                    char** argv, double wall_seconds)
{
    nlohmann::json args = nlohmann::json::array();
    for (int a = 0; a < argc; ++a)
        args.push_back(argv[a]);
    const nlohmann::json manifest = {{"command", command.get_name()},
                                     {"model", model},
                                     {"params", collect_params(command)},
                                     {"argv", args},
                                     {"version", RESONANCE_VERSION},
                                     {"wall_seconds", wall_seconds},
                                     {"tolerances", {{"tol", g.tol}}},
                                     {"jobs", g.jobs},
                                     {"format", g.format}};
    std::ofstream out(g.out + ".manifest.json");
    if (!out)
        resonance::fail(resonance::ErrorCode::InvalidInput, "cannot write " + g.out + ".manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Open tight-binding quantum dots: discrete spectrum, Green's functions and time evolution."};
    app.set_version_flag("--version", RESONANCE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.footer("Exit codes: 0 success, 1 numerical failure or failed check, 2 input error.\n"
               "Grids: comma-separated values or start:stop:step ranges (inclusive), e.g. 0:200:0.5,250.");

    kit::GlobalOptions g;
    g.jobs = default_jobs();
    app.add_option("--tol", g.tol, "Absolute tolerance for quadrature and checks")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads (default RESONANCE_KIT_JOBS or 1)")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
    app.add_option("--out", g.out, "Output file (stdout if omitted); also writes <out>.manifest.json");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    kit::SpectrumArgs spectrum;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Discrete states of the model");
    spectrum_cmd->add_option("model", spectrum.model, "Model JSON file")->required()->check(CLI::ExistingFile);
    spectrum_cmd->add_flag("--allow-warnings", spectrum.allow_warnings,
                           "Report near-degenerate spectra instead of failing");

    kit::VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run completeness and consistency checks");
    verify_cmd->add_option("model", verify.model, "Model JSON file")->check(CLI::ExistingFile);
    verify_cmd->add_option("--random", verify.random, "Also check N random models")->check(CLI::Range(1, 100000));
    verify_cmd->add_option("--n", verify.n_sites, "Dot size for random models (0 draws 1..6)")
        ->capture_default_str();
    verify_cmd->add_option("--seed", verify.seed, "Random seed")->capture_default_str();

    kit::GreensArgs greens;
    auto* greens_cmd = app.add_subcommand("greens", "Green's function elements or transmission");
    greens_cmd->add_option("model", greens.model, "Model JSON file")->required()->check(CLI::ExistingFile);
    greens_cmd->add_option("--element", greens.elements, "Element a,b with sites i or LEAD:x (repeatable)");
    greens_cmd->add_option("--E", greens.energies, "Real energy grid");
    greens_cmd->add_option("--lambda", greens.lambdas, "Comma-separated lambda values re or re:im");
    greens_cmd->add_option("--transmission", greens.transmission, "Lead pair IN,OUT");

    kit::SurvivalArgs survival;
    auto* survival_cmd = app.add_subcommand("survival", "Dot-to-dot amplitude <d_j|exp(-iHt)|d_i>");
    survival_cmd->add_option("model", survival.model, "Model JSON file")->required()->check(CLI::ExistingFile);
    survival_cmd->add_option("--i", survival.i, "Source dot site (1-based)")->capture_default_str();
    survival_cmd->add_option("--j", survival.j, "Sink dot site (1-based)")->capture_default_str();
    survival_cmd->add_option("--t", survival.times, "Time grid")->required();
    survival_cmd->add_option("--method", survival.method, "quadrature, poles or oracle")
        ->check(CLI::IsMember({"quadrature", "poles", "oracle"}))
        ->capture_default_str();
    survival_cmd->add_flag("--groups", survival.groups, "Also print the pole-expansion groups (poles only)");
    survival_cmd->add_option("--lead-length", survival.lead_length, "Oracle lead length")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();

    kit::EscapeArgs escape;
    int escape_x = 0;
    double escape_k = 0.0;
    auto* escape_cmd = app.add_subcommand("escape", "Amplitude to reach a lead site or lead momentum");
    escape_cmd->add_option("model", escape.model, "Model JSON file")->required()->check(CLI::ExistingFile);
    escape_cmd->add_option("--lead", escape.lead, "Lead label")->required();
    auto* x_opt = escape_cmd->add_option("--x", escape_x, "Lead site (>= 1)")->check(CLI::PositiveNumber);
    auto* k_opt = escape_cmd->add_option("--k", escape_k, "Lead momentum in (0, pi)");
    x_opt->excludes(k_opt);
    escape_cmd->add_option("--i", escape.i, "Source dot site (1-based)")->capture_default_str();
    escape_cmd->add_option("--t", escape.times, "Time grid")->required();
    escape_cmd->add_option("--method", escape.method, "quadrature, poles or oracle")
        ->check(CLI::IsMember({"quadrature", "poles", "oracle"}))
        ->capture_default_str();
    escape_cmd->add_flag("--groups", escape.groups, "Also print the pole-expansion groups (poles only)");
    escape_cmd->add_option("--lead-length", escape.lead_length, "Oracle lead length")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();

    kit::PacketArgs packet;
    auto* packet_cmd = app.add_subcommand("packet", "Gaussian packet launched from a lead");
    packet_cmd->add_option("model", packet.model, "Model JSON file")->required()->check(CLI::ExistingFile);
    packet_cmd->add_option("--lead", packet.lead, "Lead holding the packet")->capture_default_str();
    packet_cmd->add_option("--x0", packet.x0, "Packet centre")->capture_default_str();
    packet_cmd->add_option("--width", packet.width, "Packet width")->check(CLI::PositiveNumber)->capture_default_str();
    packet_cmd->add_option("--k0", packet.k0, "Carrier momentum")->capture_default_str();
    packet_cmd->add_option("--x-max", packet.x_max, "Last lead site written")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    packet_cmd->add_option("--t", packet.times, "Time grid")->required();
    packet_cmd->add_option("--method", packet.method, "quadrature or oracle")
        ->check(CLI::IsMember({"quadrature", "poles", "oracle"}))
        ->capture_default_str();
    packet_cmd->add_flag("--components", packet.components, "Split into free and per-state parts");
    packet_cmd->add_option("--lead-length", packet.lead_length, "Oracle lead length")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }
    if (x_opt->count() > 0)
        escape.x = escape_x;
    if (k_opt->count() > 0)
        escape.k = escape_k;

    const auto start = std::chrono::steady_clock::now();
    const CLI::App* command = app.get_subcommands().front();
    try {
        int code = exit_ok;
        std::string model;
        if (command == spectrum_cmd) {
            code = kit::run_spectrum(g, spectrum);
            model = spectrum.model;
        } else if (command == verify_cmd) {
            code = kit::run_verify(g, verify);
            model = verify.model;
        } else if (command == greens_cmd) {
            code = kit::run_greens(g, greens);
            model = greens.model;
        } else if (command == survival_cmd) {
            code = kit::run_survival(g, survival);
            model = survival.model;
        } else if (command == escape_cmd) {
            code = kit::run_escape(g, escape);
            model = escape.model;
        } else {
            code = kit::run_packet(g, packet);
            model = packet.model;
        }
        if (!g.out.empty() && g.out != "-") {
            const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
            write_manifest(g, *command, model, argc, argv, wall.count());
        }
        return code;
    } catch (const resonance::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return resonance::is_input_error(e.code()) ? exit_input : exit_numerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: InvalidInput: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}
