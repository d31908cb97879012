#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "qtdi.h"

namespace {

int emit_error(int code, const std::string& message) {
    nlohmann::json j;
    j["error"]["code"] = code;
    j["error"]["message"] = message;
    std::cerr << j.dump() << "\n";
    return code == 0 ? 1 : code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qtdi - quantum time-domain interferometry simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    qtdi_cli::FlagOverrides overrides;
    std::string out_dir, momenta;
    std::uint64_t seed = 0, shots = 0;
    int phases = 0, threads = 0;

    app.add_option("--config", config_path, "path to the run configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides [noise] seed)");
    auto* shots_opt = app.add_option("--shots", shots, "shot count (overrides [noise] shots)");
    auto* phases_opt = app.add_option("--phases", phases, "phase-grid size (overrides [scan] phases)");
    auto* momenta_opt =
        app.add_option("--momenta", momenta, "momentum indices, comma list or 'all'");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads for grid sweeps");

    auto* cmd_isf = app.add_subcommand("isf", "exact intermediate scattering function scan");
    auto* cmd_split = app.add_subcommand("split", "projective/coherent decomposition of the DCF");
    auto* cmd_interf = app.add_subcommand("interferogram", "phase-scan detection records");
    auto* cmd_recover = app.add_subcommand("recover", "ISF recovery from interferograms");
    auto* cmd_back = app.add_subcommand("backaction", "consecutive-measurement comparison");
    auto* cmd_sym = app.add_subcommand("symcheck", "quantum/classical symmetry report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        return emit_error(e.get_exit_code(), e.what());
    }

    try {
        if (*out_opt) overrides.out_dir = out_dir;
        if (*seed_opt) overrides.seed = seed;
        if (*shots_opt) overrides.shots = shots;
        if (*phases_opt) overrides.phases = phases;
        if (*momenta_opt) overrides.momenta = momenta;
        if (*threads_opt) overrides.threads = threads;

        const qtdi_cli::RunConfig cfg =
            qtdi_cli::parse_config(qtdi_cli::read_file(config_path), overrides);

        const char* log = std::getenv("QTDI_LOG");
        if (log && std::string(log) == "debug")
            std::cerr << "resolved config (hash " << qtdi_cli::hex64(cfg.hash()) << "):\n"
                      << cfg.canonical();

        if (cmd_isf->parsed()) return qtdi_cli::run_isf(cfg);
        if (cmd_split->parsed()) return qtdi_cli::run_split(cfg);
        if (cmd_interf->parsed()) return qtdi_cli::run_interferogram(cfg);
        if (cmd_recover->parsed()) return qtdi_cli::run_recover(cfg);
        if (cmd_back->parsed()) return qtdi_cli::run_backaction(cfg);
        if (cmd_sym->parsed()) return qtdi_cli::run_symcheck(cfg);
        return emit_error(1, "no subcommand selected");
    } catch (const qtdi_cli::CliError& e) {
        return emit_error(e.code, e.what());
    } catch (const std::exception& e) {
        return emit_error(10, e.what());
    }
}
