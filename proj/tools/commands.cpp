#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qtdi.h"

namespace qtdi_cli {

namespace {

void check(qtdi_status status) {
    if (status != QTDI_OK) throw CliError(static_cast<int>(status), qtdi_error_message());
}

struct SystemDeleter {
    void operator()(qtdi_system* p) const { qtdi_system_destroy(p); }
};
struct StateDeleter {
    void operator()(qtdi_state* p) const { qtdi_state_destroy(p); }
};
struct ReportDeleter {
    void operator()(qtdi_backaction* p) const { qtdi_backaction_destroy(p); }
};
using SystemPtr = std::unique_ptr<qtdi_system, SystemDeleter>;
using StatePtr = std::unique_ptr<qtdi_state, StateDeleter>;
using ReportPtr = std::unique_ptr<qtdi_backaction, ReportDeleter>;

struct OwnedString {
    explicit OwnedString(char* p) : ptr(p) {}
    ~OwnedString() { qtdi_string_free(ptr); }
    OwnedString(const OwnedString&) = delete;
    OwnedString& operator=(const OwnedString&) = delete;
    char* ptr;
};

SystemPtr make_system(const RunConfig& cfg) {
    const qtdi_statistics stats =
        cfg.statistics == "fermion" ? QTDI_SPINLESS_FERMION : QTDI_HARDCORE_BOSON;
    SystemPtr sys(qtdi_system_create(cfg.sites, cfg.particles, stats, cfg.hopping,
                                     cfg.interaction,
                                     cfg.potentials.empty() ? nullptr : cfg.potentials.data()));
    if (!sys) throw CliError(3, qtdi_error_message());
    return sys;
}

StatePtr make_state(const RunConfig& cfg, const qtdi_system* sys) {
    qtdi_state* state = nullptr;
    switch (cfg.state_kind) {
        case StateKind::fock:
            state = qtdi_state_fock(sys, cfg.occupations.data());
            break;
        case StateKind::uniform: {
            std::vector<int> flat;
            for (const auto& c : cfg.configurations)
                flat.insert(flat.end(), c.begin(), c.end());
            state = qtdi_state_uniform(sys, flat.data(), static_cast<int>(cfg.configurations.size()));
            break;
        }
        case StateKind::amplitudes: {
            const auto dim = qtdi_system_dimension(sys);
            if (static_cast<int64_t>(cfg.amplitudes.size()) != dim)
                throw CliError(3, "config: state.amplitudes must list " + std::to_string(dim) +
                                      " entries for this lattice");
            std::vector<double> re, im;
            for (const auto& [r, i] : cfg.amplitudes) {
                re.push_back(r);
                im.push_back(i);
            }
            int renorm = 0;
            state = qtdi_state_amplitudes(sys, re.data(), im.data(), &renorm);
            if (state && renorm)
                std::cerr << "warning: state amplitudes renormalized to unit norm\n";
            break;
        }
    }
    if (!state) throw CliError(3, qtdi_error_message());
    return StatePtr(state);
}

std::vector<std::string> header_lines(const RunConfig& cfg) {
    return {std::string("# qtdi ") + qtdi_version(), "# config_hash=" + hex64(cfg.hash()),
            "# seed=" + std::to_string(cfg.seed)};
}

std::string header_text(const RunConfig& cfg) {
    std::string out;
    for (const auto& line : header_lines(cfg)) out += line + "\n";
    return out;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::vector<double> uniform_phases(int n) {
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        grid[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / n;
    return grid;
}

nlohmann::json meta_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["version"] = qtdi_version();
    j["config_hash"] = hex64(cfg.hash());
    j["seed"] = cfg.seed;
    return j;
}

// Per-momentum cosine fits assembled into complex S with covariance data.
struct ScanArrays {
    std::vector<double> re, im, sigma_abs, sigma_arg, var_re, var_im, cov_re_im;
    void resize(std::size_t n) {
        re.resize(n);
        im.resize(n);
        sigma_abs.resize(n);
        sigma_arg.resize(n);
        var_re.resize(n);
        var_im.resize(n);
        cov_re_im.resize(n);
    }
};

void write_recovered_outputs(const RunConfig& cfg, const qtdi_system* sys,
                             const ScanArrays& scan) {
    const auto n = cfg.momenta.size();
    std::ostringstream csv;
    csv << header_text(cfg);
    csv << "# t_alpha=" << format_double(cfg.t1) << "\n";
    csv << "# t_beta=" << format_double(cfg.t2) << "\n";
    csv << "# shots=" << cfg.shots << "\n";
    csv << "# convention=S = (B/2)*exp(i*phi0); arg S = phi0\n";
    csv << "p,re_S,im_S,sigma_abs,sigma_arg\n";
    for (std::size_t k = 0; k < n; ++k) {
        double p = 0.0;
        check(qtdi_system_momentum(sys, cfg.momenta[k], &p));
        csv << format_double(p) << "," << format_double(scan.re[k]) << ","
            << format_double(scan.im[k]) << "," << format_double(scan.sigma_abs[k]) << ","
            << format_double(scan.sigma_arg[k]) << "\n";
    }
    write_file(out_path(cfg, "recovered_isf.csv"), csv.str());

    nlohmann::json sidecar = meta_json(cfg);
    sidecar["t_alpha"] = cfg.t1;
    sidecar["t_beta"] = cfg.t2;
    sidecar["shots"] = cfg.shots;
    sidecar["convention"] = "S = (B/2)*exp(i*phi0); arg S = phi0";
    sidecar["sites"] = cfg.sites;
    sidecar["momentum_indices"] = cfg.momenta;
    write_file(out_path(cfg, "recovered_isf.json"), sidecar.dump(2) + "\n");

    if (!cfg.reconstruct) return;
    if (static_cast<int>(n) != cfg.sites)
        throw CliError(4, "incomplete momentum grid: Im Gamma reconstruction needs all " +
                              std::to_string(cfg.sites) + " momenta");
    std::vector<double> value(static_cast<std::size_t>(cfg.sites));
    std::vector<double> sigma(static_cast<std::size_t>(cfg.sites));
    check(qtdi_recover_im_gamma(cfg.sites, cfg.momenta.data(), static_cast<int>(n),
                                scan.re.data(), scan.im.data(), scan.var_re.data(),
                                scan.var_im.data(), scan.cov_re_im.data(), value.data(),
                                sigma.data()));
    std::ostringstream gamma;
    gamma << header_text(cfg);
    gamma << "d,im_gamma,sigma\n";
    for (int d = 0; d < cfg.sites; ++d)
        gamma << d << "," << format_double(value[static_cast<std::size_t>(d)]) << ","
              << format_double(sigma[static_cast<std::size_t>(d)]) << "\n";
    write_file(out_path(cfg, "im_gamma.csv"), gamma.str());
}

} // namespace

int run_isf(const RunConfig& cfg) {
    auto sys = make_system(cfg);
    auto state = make_state(cfg, sys.get());
    std::ostringstream csv;
    csv << header_text(cfg);
    csv << "p,t1,t2,re_S,im_S\n";
    for (int m : cfg.momenta) {
        double p = 0.0, re = 0.0, im = 0.0;
        check(qtdi_system_momentum(sys.get(), m, &p));
        check(qtdi_isf(sys.get(), state.get(), cfg.t1, cfg.t2, m, &re, &im));
        csv << format_double(p) << "," << format_double(cfg.t1) << "," << format_double(cfg.t2)
            << "," << format_double(re) << "," << format_double(im) << "\n";
    }
    write_file(out_path(cfg, "isf.csv"), csv.str());
    return 0;
}

int run_split(const RunConfig& cfg) {
    auto sys = make_system(cfg);
    auto state = make_state(cfg, sys.get());
    std::ostringstream csv;
    csv << header_text(cfg);
    csv << "d,re_G,im_G,re_Gproj,re_Gamma,im_Gamma\n";
    for (int d = 0; d < cfg.sites; ++d) {
        double out[6];
        check(qtdi_split_dcf(sys.get(), state.get(), cfg.t1, cfg.t2, d, out));
        csv << d << "," << format_double(out[0]) << "," << format_double(out[1]) << ","
            << format_double(out[2]) << "," << format_double(out[4]) << ","
            << format_double(out[5]) << "\n";
    }
    write_file(out_path(cfg, "split.csv"), csv.str());
    return 0;
}

namespace {

void emit_interferogram_file(const RunConfig& cfg, const qtdi_system* sys,
                             const qtdi_state* state, int momentum_index) {
    const auto phases = uniform_phases(cfg.phases);
    std::vector<double> intensity(phases.size()), sigma(phases.size());
    const std::uint64_t record_seed =
        cfg.shots > 0 ? qtdi_derive_stream(cfg.seed, static_cast<std::uint64_t>(momentum_index))
                      : 0;
    check(qtdi_interferogram(sys, state, momentum_index, cfg.t1, cfg.t2, phases.data(),
                             cfg.phases, cfg.shots, record_seed, cfg.threads, intensity.data(),
                             sigma.data()));
    const auto headers = header_lines(cfg);
    std::vector<const char*> header_ptrs;
    for (const auto& h : headers) header_ptrs.push_back(h.c_str());
    OwnedString csv(qtdi_record_to_csv(momentum_index, cfg.sites, cfg.t1, cfg.t2, cfg.shots,
                                       record_seed, phases.data(), intensity.data(), sigma.data(),
                                       cfg.phases, header_ptrs.data(),
                                       static_cast<int>(header_ptrs.size())));
    if (!csv.ptr) throw CliError(10, qtdi_error_message());
    write_file(out_path(cfg, "interferogram_m" + std::to_string(momentum_index) + ".csv"),
               csv.ptr);
}

} // namespace

int run_interferogram(const RunConfig& cfg) {
    auto sys = make_system(cfg);
    auto state = make_state(cfg, sys.get());
    for (int m : cfg.momenta) emit_interferogram_file(cfg, sys.get(), state.get(), m);
    return 0;
}

int run_recover(const RunConfig& cfg) {
    auto sys = make_system(cfg);
    const auto n = cfg.momenta.size();
    ScanArrays scan;
    scan.resize(n);

    if (cfg.records_dir.empty()) {
        auto state = make_state(cfg, sys.get());
        check(qtdi_recover_scan(sys.get(), state.get(), cfg.t1, cfg.t2, cfg.momenta.data(),
                                static_cast<int>(n), cfg.phases, cfg.shots, cfg.seed, cfg.threads,
                                scan.re.data(), scan.im.data(), scan.sigma_abs.data(),
                                scan.sigma_arg.data(), scan.var_re.data(), scan.var_im.data(),
                                scan.cov_re_im.data()));
        // persist the records the scan was fitted from
        for (int m : cfg.momenta) emit_interferogram_file(cfg, sys.get(), state.get(), m);
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            const int m = cfg.momenta[k];
            const std::string path =
                (std::filesystem::path(cfg.records_dir) / ("interferogram_m" + std::to_string(m) + ".csv"))
                    .string();
            const std::string text = read_file(path);
            int count = 0;
            check(qtdi_record_from_csv(text.c_str(), &count, nullptr, nullptr, nullptr, nullptr));
            std::vector<double> phi(static_cast<std::size_t>(count)),
                inten(static_cast<std::size_t>(count)), sig(static_cast<std::size_t>(count));
            check(qtdi_record_from_csv(text.c_str(), &count, phi.data(), inten.data(), sig.data(),
                                       nullptr));
            double fit[10];
            check(qtdi_fit_cosine(phi.data(), inten.data(), sig.data(), count, fit));
            // S = (B/2) e^{i phi0}; quadrature covariances map to Re/Im S
            scan.re[k] = 0.5 * fit[1] * std::cos(fit[2]);
            scan.im[k] = 0.5 * fit[1] * std::sin(fit[2]);
            scan.sigma_abs[k] = 0.5 * fit[5];
            scan.sigma_arg[k] = fit[6];
            scan.var_re[k] = 0.25 * fit[7];
            scan.var_im[k] = 0.25 * fit[8];
            scan.cov_re_im[k] = -0.25 * fit[9];
        }
    }
    write_recovered_outputs(cfg, sys.get(), scan);
    return 0;
}

int run_backaction(const RunConfig& cfg) {
    if (cfg.shots < 1)
        throw CliError(3, "backaction requires noise.shots >= 1");
    auto sys = make_system(cfg);
    auto state = make_state(cfg, sys.get());
    ReportPtr report(qtdi_backaction_run(sys.get(), state.get(), cfg.t1, cfg.t2, cfg.shots,
                                         cfg.seed, cfg.phases, cfg.threads));
    if (!report) throw CliError(10, qtdi_error_message());
    OwnedString json(qtdi_backaction_json(report.get(), qtdi_version(), cfg.hash()));
    if (!json.ptr) throw CliError(10, qtdi_error_message());
    write_file(out_path(cfg, "backaction.json"), json.ptr);
    OwnedString table(qtdi_backaction_table(report.get()));
    if (!table.ptr) throw CliError(10, qtdi_error_message());
    std::cout << table.ptr;
    return 0;
}

int run_symcheck(const RunConfig& cfg) {
    auto sys = make_system(cfg);
    auto state = make_state(cfg, sys.get());
    double quantum_isf = 0.0, quantum_dcf = 0.0, classical_isf = 0.0;
    check(qtdi_symmetry_check(sys.get(), state.get(), cfg.t1, cfg.t2, &quantum_isf, &quantum_dcf,
                              &classical_isf));
    nlohmann::json j = meta_json(cfg);
    j["t1"] = cfg.t1;
    j["t2"] = cfg.t2;
    j["quantum_isf_violation"] = quantum_isf;
    j["quantum_dcf_violation"] = quantum_dcf;
    j["classical_isf_violation"] = classical_isf;
    write_file(out_path(cfg, "symcheck.json"), j.dump(2) + "\n");
    std::cout << "quantum ISF violation  " << format_double(quantum_isf) << "\n"
              << "quantum DCF violation  " << format_double(quantum_dcf) << "\n"
              << "classical violation    " << format_double(classical_isf) << "\n";
    return 0;
}

} // namespace qtdi_cli
