#include "qtdi.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "qtdi/backaction.hpp"
#include "qtdi/correlations.hpp"
#include "qtdi/dynamics.hpp"
#include "qtdi/hilbert.hpp"
#include "qtdi/recovery.hpp"
#include "qtdi/scattering.hpp"
#include "qtdi/util.hpp"

struct qtdi_system {
    qtdi::FockBasis basis;
    std::shared_ptr<const qtdi::Spectral> spectral;
};

struct qtdi_state {
    qtdi::StateVector psi;
};

struct qtdi_backaction {
    qtdi::ComparisonReport report;
};

namespace {

thread_local std::string g_error;

qtdi_status map_code(qtdi::ErrorCode code) {
    switch (code) {
        case qtdi::ErrorCode::capacity: return QTDI_ERR_CAPACITY;
        case qtdi::ErrorCode::index: return QTDI_ERR_INDEX;
        case qtdi::ErrorCode::config: return QTDI_ERR_CONFIG;
        case qtdi::ErrorCode::grid: return QTDI_ERR_GRID;
        case qtdi::ErrorCode::numeric: return QTDI_ERR_NUMERIC;
        case qtdi::ErrorCode::identifiability: return QTDI_ERR_IDENTIFIABILITY;
        case qtdi::ErrorCode::parse: return QTDI_ERR_PARSE;
        case qtdi::ErrorCode::io: return QTDI_ERR_IO;
    }
    return QTDI_ERR_INTERNAL;
}

template <typename Fn>
qtdi_status guarded(Fn&& fn) {
    try {
        fn();
        return QTDI_OK;
    } catch (const qtdi::Error& err) {
        g_error = err.what();
        return map_code(err.code());
    } catch (const std::exception& err) {
        g_error = err.what();
        return QTDI_ERR_INTERNAL;
    }
}

template <typename Fn>
auto guarded_ptr(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const qtdi::Error& err) {
        g_error = err.what();
        return nullptr;
    } catch (const std::exception& err) {
        g_error = err.what();
        return nullptr;
    }
}

qtdi_status invalid(const char* message) {
    g_error = message;
    return QTDI_ERR_INVALID;
}

char* copy_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

bool momentum_ok(const qtdi_system* system, int m) {
    return m >= 0 && m < system->basis.sites();
}

} // namespace

extern "C" {

const char* qtdi_version(void) { return "1.0.0"; }

const char* qtdi_error_message(void) { return g_error.c_str(); }

void qtdi_string_free(char* text) { std::free(text); }

uint64_t qtdi_derive_stream(uint64_t seed, uint64_t index) {
    return qtdi::derive_stream(seed, index);
}

qtdi_system* qtdi_system_create(int sites, int particles, qtdi_statistics statistics,
                                double hopping, double interaction, const double* potentials) {
    return guarded_ptr([&]() -> qtdi_system* {
        qtdi::LatticeSpec lattice;
        lattice.sites = sites;
        lattice.particles = particles;
        lattice.statistics = statistics == QTDI_SPINLESS_FERMION
                                 ? qtdi::Statistics::spinless_fermion
                                 : qtdi::Statistics::hardcore_boson;
        auto system = std::make_unique<qtdi_system>();
        system->basis = qtdi::FockBasis::build(lattice);
        qtdi::HamiltonianSpec hspec;
        hspec.hopping = hopping;
        hspec.interaction = interaction;
        if (potentials) hspec.potentials = Eigen::Map<const qtdi::Vector>(potentials, sites);
        system->spectral = qtdi::Spectral::decompose(qtdi::build_hamiltonian(system->basis, hspec));
        return system.release();
    });
}

void qtdi_system_destroy(qtdi_system* system) { delete system; }

int qtdi_system_sites(const qtdi_system* system) { return system ? system->basis.sites() : 0; }

int qtdi_system_particles(const qtdi_system* system) {
    return system ? system->basis.particles() : 0;
}

int64_t qtdi_system_dimension(const qtdi_system* system) {
    return system ? static_cast<int64_t>(system->basis.dimension()) : 0;
}

qtdi_status qtdi_system_momentum(const qtdi_system* system, int momentum_index,
                                 double* momentum) {
    if (!system || !momentum) return invalid("null argument");
    return guarded([&] {
        if (!momentum_ok(system, momentum_index))
            throw qtdi::Error(qtdi::ErrorCode::grid, "momentum index off the lattice grid");
        *momentum = qtdi::momentum_grid(system->basis.sites())[momentum_index];
    });
}

qtdi_state* qtdi_state_fock(const qtdi_system* system, const int* occupations) {
    if (!system || !occupations) {
        g_error = "null argument";
        return nullptr;
    }
    return guarded_ptr([&]() -> qtdi_state* {
        std::vector<int> occ(occupations, occupations + system->basis.sites());
        auto state = std::make_unique<qtdi_state>();
        state->psi = qtdi::fock_state(system->basis, occ);
        return state.release();
    });
}

qtdi_state* qtdi_state_uniform(const qtdi_system* system, const int* occupations, int n_configs) {
    if (!system || !occupations || n_configs < 1) {
        g_error = "null argument or empty configuration list";
        return nullptr;
    }
    return guarded_ptr([&]() -> qtdi_state* {
        const int sites = system->basis.sites();
        std::vector<std::uint64_t> masks;
        masks.reserve(static_cast<std::size_t>(n_configs));
        for (int k = 0; k < n_configs; ++k) {
            std::vector<int> occ(occupations + k * sites, occupations + (k + 1) * sites);
            masks.push_back(qtdi::occupation_mask(occ));
        }
        auto state = std::make_unique<qtdi_state>();
        state->psi = qtdi::uniform_superposition(system->basis, masks);
        return state.release();
    });
}

qtdi_state* qtdi_state_amplitudes(const qtdi_system* system, const double* re, const double* im,
                                  int* renormalized) {
    if (!system || !re) {
        g_error = "null argument";
        return nullptr;
    }
    return guarded_ptr([&]() -> qtdi_state* {
        const auto dim = static_cast<Eigen::Index>(system->basis.dimension());
        qtdi::VectorC amps(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            amps[i] = qtdi::Complex(re[i], im ? im[i] : 0.0);
        bool flag = false;
        auto state = std::make_unique<qtdi_state>();
        state->psi = qtdi::state_from_amplitudes(system->basis, amps, &flag);
        if (renormalized) *renormalized = flag ? 1 : 0;
        return state.release();
    });
}

void qtdi_state_destroy(qtdi_state* state) { delete state; }

qtdi_status qtdi_dcf(const qtdi_system* system, const qtdi_state* state, double t1, double t2,
                     int displacement, double* re, double* im) {
    if (!system || !state || !re || !im) return invalid("null argument");
    return guarded([&] {
        const auto u1 = system->spectral->propagator(t1);
        const auto u2 = system->spectral->propagator(t2);
        const qtdi::Complex g = qtdi::dcf(system->basis, state->psi, u1, u2, displacement);
        *re = g.real();
        *im = g.imag();
    });
}

qtdi_status qtdi_isf(const qtdi_system* system, const qtdi_state* state, double t1, double t2,
                     int momentum_index, double* re, double* im) {
    if (!system || !state || !re || !im) return invalid("null argument");
    return guarded([&] {
        const auto u1 = system->spectral->propagator(t1);
        const auto u2 = system->spectral->propagator(t2);
        const qtdi::Complex s = qtdi::isf(system->basis, state->psi, u1, u2, momentum_index);
        *re = s.real();
        *im = s.imag();
    });
}

qtdi_status qtdi_split_dcf(const qtdi_system* system, const qtdi_state* state, double t1,
                           double t2, int displacement, double out[6]) {
    if (!system || !state || !out) return invalid("null argument");
    return guarded([&] {
        const auto u1 = system->spectral->propagator(t1);
        const auto u2 = system->spectral->propagator(t2);
        const auto split = qtdi::split_dcf(system->basis, state->psi, u1, u2, displacement);
        out[0] = split.total.real();
        out[1] = split.total.imag();
        out[2] = split.projective.real();
        out[3] = split.projective.imag();
        out[4] = split.coherent.real();
        out[5] = split.coherent.imag();
    });
}

qtdi_status qtdi_isf_split(const qtdi_system* system, const qtdi_state* state, double t1,
                           double t2, int momentum_index, double out[6]) {
    if (!system || !state || !out) return invalid("null argument");
    return guarded([&] {
        const auto u1 = system->spectral->propagator(t1);
        const auto u2 = system->spectral->propagator(t2);
        const auto split = qtdi::isf_split(system->basis, state->psi, u1, u2, momentum_index);
        out[0] = split.total.real();
        out[1] = split.total.imag();
        out[2] = split.projective.real();
        out[3] = split.projective.imag();
        out[4] = split.coherent.real();
        out[5] = split.coherent.imag();
    });
}

qtdi_status qtdi_symmetry_check(const qtdi_system* system, const qtdi_state* state, double t1,
                                double t2, double* quantum_isf, double* quantum_dcf,
                                double* classical_isf) {
    if (!system || !state) return invalid("null argument");
    return guarded([&] {
        const auto u1 = system->spectral->propagator(t1);
        const auto u2 = system->spectral->propagator(t2);
        const auto report = qtdi::symmetry_check(system->basis, state->psi, u1, u2);
        if (quantum_isf) *quantum_isf = report.quantum_isf;
        if (quantum_dcf) *quantum_dcf = report.quantum_dcf;
        if (classical_isf) *classical_isf = report.classical_isf;
    });
}

qtdi_status qtdi_reconstruct_im_gamma(int sites, const double* isf_re, const double* isf_im,
                                      double* im_gamma) {
    if (!isf_re || !isf_im || !im_gamma) return invalid("null argument");
    if (sites < 1) return invalid("sites must be positive");
    return guarded([&] {
        qtdi::VectorC grid(sites);
        for (int m = 0; m < sites; ++m) grid[m] = qtdi::Complex(isf_re[m], isf_im[m]);
        const qtdi::Vector out = qtdi::reconstruct_im_gamma(grid);
        for (int d = 0; d < sites; ++d) im_gamma[d] = out[d];
    });
}

qtdi_status qtdi_intensity(const double isf6[6], int shape, double width, double t_alpha,
                           double t_beta, double phi_alpha, double phi_beta, int overlapped,
                           double detection_offset, double* intensity) {
    if (!isf6 || !intensity) return invalid("null argument");
    return guarded([&] {
        qtdi::IsfInputs inputs{{isf6[0], isf6[1]}, {isf6[2], isf6[3]}, {isf6[4], isf6[5]}};
        qtdi::WavepacketPair pair;
        pair.shape = shape == 1 ? qtdi::Envelope::rectangular : qtdi::Envelope::gaussian;
        pair.width = width;
        pair.t_alpha = t_alpha;
        pair.t_beta = t_beta;
        pair.phi_alpha = phi_alpha;
        pair.phi_beta = phi_beta;
        pair.equal_shape = overlapped != 0;
        qtdi::DetectorConfig config;
        config.mode = overlapped ? qtdi::OverlapMode::overlapped : qtdi::OverlapMode::raw;
        *intensity = qtdi::intensity(inputs, pair, config, detection_offset);
    });
}

qtdi_status qtdi_interferogram(const qtdi_system* system, const qtdi_state* state,
                               int momentum_index, double t_alpha, double t_beta,
                               const double* phases, int n_phases, uint64_t shots, uint64_t seed,
                               int threads, double* out_intensity, double* out_sigma) {
    if (!system || !state || !phases || !out_intensity || !out_sigma)
        return invalid("null argument");
    return guarded([&] {
        qtdi::WavepacketPair pair;
        pair.t_alpha = t_alpha;
        pair.t_beta = t_beta;
        qtdi::DetectorConfig config;
        config.momentum_index = momentum_index;
        std::vector<double> grid(phases, phases + n_phases);
        std::optional<qtdi::NoiseSpec> noise;
        if (shots > 0) noise = qtdi::NoiseSpec{shots, seed};
        const auto record = qtdi::interferogram(system->basis, state->psi, system->spectral, pair,
                                                config, grid, noise, threads);
        for (int i = 0; i < n_phases; ++i) {
            out_intensity[i] = record.points[static_cast<std::size_t>(i)].intensity;
            out_sigma[i] = record.points[static_cast<std::size_t>(i)].sigma;
        }
    });
}

char* qtdi_record_to_csv(int momentum_index, int sites, double t_alpha, double t_beta,
                         uint64_t shots, uint64_t seed, const double* phases,
                         const double* intensities, const double* sigmas, int n_points,
                         const char* const* extra_header, int n_extra) {
    if (!phases || !intensities || !sigmas || n_points < 1) {
        g_error = "null argument or empty record";
        return nullptr;
    }
    return guarded_ptr([&]() -> char* {
        if (momentum_index < 0 || momentum_index >= sites)
            throw qtdi::Error(qtdi::ErrorCode::grid, "momentum index off the lattice grid");
        qtdi::InterferogramRecord record;
        record.momentum_index = momentum_index;
        record.momentum = qtdi::momentum_grid(sites)[static_cast<std::size_t>(momentum_index)];
        record.t_alpha = t_alpha;
        record.t_beta = t_beta;
        record.shots = shots;
        record.seed = seed;
        record.points.resize(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i)
            record.points[static_cast<std::size_t>(i)] = {phases[i], intensities[i], sigmas[i]};
        std::vector<std::string> extra;
        for (int i = 0; i < n_extra; ++i) extra.emplace_back(extra_header[i]);
        return copy_string(qtdi::record_to_csv(record, extra));
    });
}

qtdi_status qtdi_record_from_csv(const char* text, int* n_points, double* phases,
                                 double* intensities, double* sigmas, double meta[5]) {
    if (!text || !n_points) return invalid("null argument");
    return guarded([&] {
        const auto record = qtdi::record_from_csv(text);
        const int size = static_cast<int>(record.points.size());
        if (phases || intensities || sigmas) {
            if (*n_points < size)
                throw qtdi::Error(qtdi::ErrorCode::config, "output arrays too small for record");
            for (int i = 0; i < size; ++i) {
                const auto& pt = record.points[static_cast<std::size_t>(i)];
                if (phases) phases[i] = pt.phi;
                if (intensities) intensities[i] = pt.intensity;
                if (sigmas) sigmas[i] = pt.sigma;
            }
        }
        *n_points = size;
        if (meta) {
            meta[0] = record.momentum_index;
            meta[1] = record.t_alpha;
            meta[2] = record.t_beta;
            meta[3] = static_cast<double>(record.shots);
            meta[4] = static_cast<double>(record.seed);
        }
    });
}

qtdi_status qtdi_fit_cosine(const double* phases, const double* intensities, const double* sigmas,
                            int n_points, double out10[10]) {
    if (!phases || !intensities || !sigmas || !out10) return invalid("null argument");
    if (n_points < 0) return invalid("negative point count");
    return guarded([&] {
        std::vector<double> p(phases, phases + n_points);
        std::vector<double> i(intensities, intensities + n_points);
        std::vector<double> s(sigmas, sigmas + n_points);
        const qtdi::CosineFit fit = qtdi::fit_cosine(p, i, s);
        out10[0] = fit.offset;
        out10[1] = fit.amplitude;
        out10[2] = fit.phase;
        out10[3] = fit.residual_rms;
        out10[4] = fit.sigma_offset;
        out10[5] = fit.sigma_amplitude;
        out10[6] = fit.sigma_phase;
        out10[7] = fit.var_c;
        out10[8] = fit.var_s;
        out10[9] = fit.cov_cs;
    });
}

qtdi_status qtdi_recover_scan(const qtdi_system* system, const qtdi_state* state, double t_alpha,
                              double t_beta, const int* momenta, int n_momenta, int n_phases,
                              uint64_t shots, uint64_t seed, int threads, double* re_s,
                              double* im_s, double* sigma_abs, double* sigma_arg, double* var_re,
                              double* var_im, double* cov_re_im) {
    if (!system || !state || !momenta || !re_s || !im_s) return invalid("null argument");
    return guarded([&] {
        qtdi::WavepacketPair pair;
        pair.t_alpha = t_alpha;
        pair.t_beta = t_beta;
        std::vector<int> indices(momenta, momenta + n_momenta);
        std::optional<qtdi::NoiseSpec> noise;
        if (shots > 0) noise = qtdi::NoiseSpec{shots, seed};
        const auto scan =
            qtdi::recover_isf_scan(system->basis, state->psi, system->spectral, pair,
                                   qtdi::uniform_phase_grid(n_phases), indices, noise, threads);
        for (int k = 0; k < n_momenta; ++k) {
            const auto& pt = scan.points[static_cast<std::size_t>(k)];
            re_s[k] = pt.value.real();
            im_s[k] = pt.value.imag();
            if (sigma_abs) sigma_abs[k] = pt.sigma_abs;
            if (sigma_arg) sigma_arg[k] = pt.sigma_arg;
            if (var_re) var_re[k] = pt.var_re;
            if (var_im) var_im[k] = pt.var_im;
            if (cov_re_im) cov_re_im[k] = pt.cov_re_im;
        }
    });
}

qtdi_status qtdi_recover_im_gamma(int sites, const int* momenta, int n_momenta,
                                  const double* re_s, const double* im_s, const double* var_re,
                                  const double* var_im, const double* cov_re_im,
                                  double* out_value, double* out_sigma) {
    if (!momenta || !re_s || !im_s || !out_value) return invalid("null argument");
    return guarded([&] {
        qtdi::RecoveredISF scan;
        scan.sites = sites;
        scan.momentum_indices.assign(momenta, momenta + n_momenta);
        scan.points.resize(static_cast<std::size_t>(n_momenta));
        for (int k = 0; k < n_momenta; ++k) {
            auto& pt = scan.points[static_cast<std::size_t>(k)];
            pt.value = qtdi::Complex(re_s[k], im_s[k]);
            pt.var_re = var_re ? var_re[k] : 0.0;
            pt.var_im = var_im ? var_im[k] : 0.0;
            pt.cov_re_im = cov_re_im ? cov_re_im[k] : 0.0;
        }
        const auto est = qtdi::recover_im_gamma(scan);
        for (int d = 0; d < sites; ++d) {
            out_value[d] = est.value[d];
            if (out_sigma) out_sigma[d] = est.sigma[d];
        }
    });
}

qtdi_status qtdi_projective_protocol(const qtdi_system* system, const qtdi_state* state,
                                     double t1, double t2, uint64_t shots, uint64_t seed,
                                     int threads, double* correlator, double* standard_error,
                                     double* first_marginal) {
    if (!system || !state || !correlator || !standard_error) return invalid("null argument");
    return guarded([&] {
        const auto result = qtdi::run_projective_protocol(system->basis, state->psi,
                                                          system->spectral, t1, t2, shots, seed,
                                                          threads);
        for (int d = 0; d < system->basis.sites(); ++d) {
            correlator[d] = result.correlator[d];
            standard_error[d] = result.standard_error[d];
        }
        if (first_marginal)
            for (Eigen::Index j = 0; j < result.first_marginal.size(); ++j)
                first_marginal[j] = result.first_marginal[j];
    });
}

qtdi_backaction* qtdi_backaction_run(const qtdi_system* system, const qtdi_state* state,
                                     double t1, double t2, uint64_t shots, uint64_t seed,
                                     int phase_count, int threads) {
    if (!system || !state) {
        g_error = "null argument";
        return nullptr;
    }
    return guarded_ptr([&]() -> qtdi_backaction* {
        auto report = std::make_unique<qtdi_backaction>();
        report->report = qtdi::compare_protocols(system->basis, state->psi, system->spectral, t1,
                                                 t2, shots, seed, phase_count, threads);
        return report.release();
    });
}

void qtdi_backaction_destroy(qtdi_backaction* report) { delete report; }

int qtdi_backaction_rows(const qtdi_backaction* report) {
    return report ? static_cast<int>(report->report.rows.size()) : 0;
}

qtdi_status qtdi_backaction_row(const qtdi_backaction* report, int displacement, double out10[10],
                                int flags[2]) {
    if (!report || !out10 || !flags) return invalid("null argument");
    if (displacement < 0 || displacement >= static_cast<int>(report->report.rows.size()))
        return invalid("displacement out of range");
    const auto& row = report->report.rows[static_cast<std::size_t>(displacement)];
    out10[0] = row.exact_total.real();
    out10[1] = row.exact_total.imag();
    out10[2] = row.exact_projective;
    out10[3] = row.exact_coherent.real();
    out10[4] = row.exact_coherent.imag();
    out10[5] = row.mc_estimate;
    out10[6] = row.mc_standard_error;
    out10[7] = row.qtdi_recovered.real();
    out10[8] = row.qtdi_recovered.imag();
    out10[9] = report->report.max_qtdi_error;
    flags[0] = row.mc_matches_projective ? 1 : 0;
    flags[1] = row.mc_matches_total ? 1 : 0;
    return QTDI_OK;
}

char* qtdi_backaction_json(const qtdi_backaction* report, const char* tool_version,
                           uint64_t config_hash) {
    if (!report) {
        g_error = "null argument";
        return nullptr;
    }
    return guarded_ptr([&]() -> char* {
        return copy_string(qtdi::report_to_json(report->report,
                                                tool_version ? tool_version : qtdi_version(),
                                                config_hash));
    });
}

char* qtdi_backaction_table(const qtdi_backaction* report) {
    if (!report) {
        g_error = "null argument";
        return nullptr;
    }
    return guarded_ptr([&]() -> char* { return copy_string(qtdi::report_table(report->report)); });
}

} // extern "C"
