/*
 * qtdi - quantum time-domain interferometry simulator, C API.
 *
 * Exact two-time density correlations of small hard-core lattice targets,
 * their projective/coherent decomposition, synthesized phase-scan detection
 * signals, complex ISF recovery from interferograms, and a Monte Carlo
 * demonstration of measurement backaction in consecutive projective
 * measurements.
 *
 * Conventions: hbar = 1, times in units of the inverse hopping, momenta on
 * the reciprocal grid p_m = 2*pi*m/L indexed by m, forward Fourier transform
 * S(p) = sum_d G(d) e^{+i p d}, detector prefactor normalized to 1.
 *
 * All functions returning qtdi_status set a thread-local message readable via
 * qtdi_error_message() on failure. Strings returned as char* are heap
 * allocated and must be released with qtdi_string_free(). Handles are opaque
 * and must be released with their matching *_destroy function. Handles are
 * immutable after creation and safe to share between threads.
 */

#ifndef QTDI_H
#define QTDI_H

#include <stdint.h>

#if defined(_WIN32)
#define QTDI_API __declspec(dllexport)
#else
#define QTDI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qtdi_status {
    QTDI_OK = 0,
    QTDI_ERR_CAPACITY = 1,        /* particle number exceeds lattice capacity */
    QTDI_ERR_INDEX = 2,           /* site/displacement/basis index out of range */
    QTDI_ERR_CONFIG = 3,          /* inconsistent specs or dimensions */
    QTDI_ERR_GRID = 4,            /* momentum off the grid, or grid incomplete */
    QTDI_ERR_NUMERIC = 5,         /* non-Hermitian input, negative intensity, ... */
    QTDI_ERR_IDENTIFIABILITY = 6, /* cosine fit not identifiable */
    QTDI_ERR_PARSE = 7,           /* malformed config or record text */
    QTDI_ERR_IO = 8,              /* filesystem failure */
    QTDI_ERR_INVALID = 9,         /* null pointer or out-of-domain argument */
    QTDI_ERR_INTERNAL = 10
} qtdi_status;

typedef enum qtdi_statistics {
    QTDI_HARDCORE_BOSON = 0,
    QTDI_SPINLESS_FERMION = 1
} qtdi_statistics;

/* Lattice + Hamiltonian + spectral decomposition bundle. */
typedef struct qtdi_system qtdi_system;
/* Normalized many-body state bound to a system's basis. */
typedef struct qtdi_state qtdi_state;
/* Backaction comparison report. */
typedef struct qtdi_backaction qtdi_backaction;

QTDI_API const char* qtdi_version(void);
QTDI_API const char* qtdi_error_message(void);
QTDI_API void qtdi_string_free(char* text);

/* Stream-seed derivation used for every per-index random stream in the
 * library; exposed so callers can reproduce per-momentum record seeds. */
QTDI_API uint64_t qtdi_derive_stream(uint64_t seed, uint64_t index);

/* ------------------------------------------------------------------ system */

/* Builds the occupation basis of `particles` hard-core particles on a
 * periodic chain of `sites` sites and diagonalizes
 *   H = -J sum (hop + h.c.) + V sum n_s n_{s+1} + sum v_s n_s.
 * `potentials` may be NULL for a flat chain. Returns NULL on failure. */
QTDI_API qtdi_system* qtdi_system_create(int sites, int particles, qtdi_statistics statistics,
                                         double hopping, double interaction,
                                         const double* potentials);
QTDI_API void qtdi_system_destroy(qtdi_system* system);
QTDI_API int qtdi_system_sites(const qtdi_system* system);
QTDI_API int qtdi_system_particles(const qtdi_system* system);
QTDI_API int64_t qtdi_system_dimension(const qtdi_system* system);
/* Momentum value p_m = 2*pi*m/L for grid index m. */
QTDI_API qtdi_status qtdi_system_momentum(const qtdi_system* system, int momentum_index,
                                          double* momentum);

/* ------------------------------------------------------------------- state */

/* `occupations` has one 0/1 entry per site. */
QTDI_API qtdi_state* qtdi_state_fock(const qtdi_system* system, const int* occupations);
/* `occupations` holds n_configs rows of `sites` 0/1 entries; equal weights. */
QTDI_API qtdi_state* qtdi_state_uniform(const qtdi_system* system, const int* occupations,
                                        int n_configs);
/* Explicit amplitudes over the basis (dimension entries). Renormalizes when
 * the norm is off by more than 1e-9 and reports it via `renormalized`. */
QTDI_API qtdi_state* qtdi_state_amplitudes(const qtdi_system* system, const double* re,
                                           const double* im, int* renormalized);
QTDI_API void qtdi_state_destroy(qtdi_state* state);

/* ------------------------------------------------------------ correlations */

/* G(d,t1,t2) = sum_s <psi| n_s(t1) n_{s+d}(t2) |psi>. */
QTDI_API qtdi_status qtdi_dcf(const qtdi_system* system, const qtdi_state* state, double t1,
                              double t2, int displacement, double* re, double* im);

/* S(p_m,t1,t2) = sum_d G(d,t1,t2) e^{+i p_m d}. */
QTDI_API qtdi_status qtdi_isf(const qtdi_system* system, const qtdi_state* state, double t1,
                              double t2, int momentum_index, double* re, double* im);

/* Projective/coherent decomposition of G at one displacement.
 * out = { G_re, G_im, Gproj_re, Gproj_im, Gamma_re, Gamma_im }. */
QTDI_API qtdi_status qtdi_split_dcf(const qtdi_system* system, const qtdi_state* state, double t1,
                                    double t2, int displacement, double out[6]);

/* Same decomposition Fourier transformed to one grid momentum. */
QTDI_API qtdi_status qtdi_isf_split(const qtdi_system* system, const qtdi_state* state, double t1,
                                    double t2, int momentum_index, double out[6]);

/* Max violations of S(p,t1,t2)* = S(p,t2,t1), G(d,t1,t2)* = G(-d,t2,t1) and
 * of the classical-only symmetry S(p,t1,t2)* = S(-p,t1,t2). */
QTDI_API qtdi_status qtdi_symmetry_check(const qtdi_system* system, const qtdi_state* state,
                                         double t1, double t2, double* quantum_isf,
                                         double* quantum_dcf, double* classical_isf);

/* Im Gamma(d) from ISF values on the full grid (arrays of length `sites`). */
QTDI_API qtdi_status qtdi_reconstruct_im_gamma(int sites, const double* isf_re,
                                               const double* isf_im, double* im_gamma);

/* -------------------------------------------------------------- scattering */

/* Detected intensity for given ISF inputs at detection offset x = R - ct.
 * isf6 = { S_aa_re, S_aa_im, S_bb_re, S_bb_im, S_ab_re, S_ab_im }.
 * shape: 0 gaussian, 1 rectangular. overlapped: nonzero sets both scattered
 * envelope factors identical. */
QTDI_API qtdi_status qtdi_intensity(const double isf6[6], int shape, double width, double t_alpha,
                                    double t_beta, double phi_alpha, double phi_beta,
                                    int overlapped, double detection_offset, double* intensity);

/* Phase scan I(phi_i) at one grid momentum. shots = 0 gives the noiseless
 * curve with sigmas = 0; otherwise each point is an independent Poisson draw
 * with per-point stream (seed, i). Arrays out_* have n_phases entries. */
QTDI_API qtdi_status qtdi_interferogram(const qtdi_system* system, const qtdi_state* state,
                                        int momentum_index, double t_alpha, double t_beta,
                                        const double* phases, int n_phases, uint64_t shots,
                                        uint64_t seed, int threads, double* out_intensity,
                                        double* out_sigma);

/* Canonical CSV form of an interferogram record ('#' metadata comments, then
 * phi,intensity,sigma rows). extra_header lines are emitted verbatim first. */
QTDI_API char* qtdi_record_to_csv(int momentum_index, int sites, double t_alpha, double t_beta,
                                  uint64_t shots, uint64_t seed, const double* phases,
                                  const double* intensities, const double* sigmas, int n_points,
                                  const char* const* extra_header, int n_extra);

/* Parses CSV produced by qtdi_record_to_csv. Call with points = NULL to query
 * the point count, then with arrays of that size. meta may be NULL; otherwise
 * meta = { momentum_index, t_alpha, t_beta, shots, seed } (doubles). */
QTDI_API qtdi_status qtdi_record_from_csv(const char* text, int* n_points, double* phases,
                                          double* intensities, double* sigmas, double meta[5]);

/* ---------------------------------------------------------------- recovery */

/* Weighted linear LS of A + B cos(phi + phi0) on the quadrature basis.
 * out10 = { A, B, phi0, residual_rms, sigma_A, sigma_B, sigma_phi0,
 *           var_c, var_s, cov_cs }. */
QTDI_API qtdi_status qtdi_fit_cosine(const double* phases, const double* intensities,
                                     const double* sigmas, int n_points, double out10[10]);

/* Interferogram + cosine fit per momentum; S = (B/2) e^{i phi0}. Momentum m
 * uses the record seed qtdi_derive_stream(seed, m). All out arrays have
 * n_momenta entries; var/cov outputs may be NULL. */
QTDI_API qtdi_status qtdi_recover_scan(const qtdi_system* system, const qtdi_state* state,
                                       double t_alpha, double t_beta, const int* momenta,
                                       int n_momenta, int n_phases, uint64_t shots, uint64_t seed,
                                       int threads, double* re_s, double* im_s, double* sigma_abs,
                                       double* sigma_arg, double* var_re, double* var_im,
                                       double* cov_re_im);

/* Im Gamma(d) with linearly propagated uncertainties from a recovered scan
 * covering the full grid. var/cov arrays may be NULL (zero uncertainty). */
QTDI_API qtdi_status qtdi_recover_im_gamma(int sites, const int* momenta, int n_momenta,
                                           const double* re_s, const double* im_s,
                                           const double* var_re, const double* var_im,
                                           const double* cov_re_im, double* out_value,
                                           double* out_sigma);

/* -------------------------------------------------------------- backaction */

/* Monte Carlo consecutive-measurement protocol. correlator/standard_error
 * have `sites` entries; first_marginal may be NULL or hold `dimension`
 * entries. */
QTDI_API qtdi_status qtdi_projective_protocol(const qtdi_system* system, const qtdi_state* state,
                                              double t1, double t2, uint64_t shots, uint64_t seed,
                                              int threads, double* correlator,
                                              double* standard_error, double* first_marginal);

/* Full comparison: exact split, Monte Carlo channel, and the noiseless
 * phase-scan recovery round trip. Returns NULL on failure. */
QTDI_API qtdi_backaction* qtdi_backaction_run(const qtdi_system* system, const qtdi_state* state,
                                              double t1, double t2, uint64_t shots, uint64_t seed,
                                              int phase_count, int threads);
QTDI_API void qtdi_backaction_destroy(qtdi_backaction* report);
QTDI_API int qtdi_backaction_rows(const qtdi_backaction* report);

/* out10 = { exact_G_re, exact_G_im, exact_Gproj, exact_Gamma_re,
 *           exact_Gamma_im, mc_estimate, mc_se, qtdi_G_re, qtdi_G_im,
 *           max_qtdi_error }; flags = { mc_matches_projective,
 *           mc_matches_total }. */
QTDI_API qtdi_status qtdi_backaction_row(const qtdi_backaction* report, int displacement,
                                         double out10[10], int flags[2]);

QTDI_API char* qtdi_backaction_json(const qtdi_backaction* report, const char* tool_version,
                                    uint64_t config_hash);
QTDI_API char* qtdi_backaction_table(const qtdi_backaction* report);

#ifdef __cplusplus
}
#endif

#endif /* QTDI_H */
