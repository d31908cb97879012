#pragma once

#include <string>
#include <vector>

#include "qtdi/scattering.hpp"
#include "qtdi/types.hpp"

namespace qtdi {

// Result of fitting A + B cos(phi + phi0) by weighted linear least squares on
// the quadrature basis {1, cos phi, sin phi}. B >= 0 and phi0 in (-pi, pi];
// the (c, s) covariance block is kept for linear error propagation downstream.
struct CosineFit {
    double offset = 0.0;      // A
    double amplitude = 0.0;   // B
    double phase = 0.0;       // phi0
    double residual_rms = 0.0;
    double sigma_offset = 0.0;
    double sigma_amplitude = 0.0;
    double sigma_phase = 0.0;
    double var_c = 0.0;   // var of the cos-quadrature coefficient
    double var_s = 0.0;   // var of the sin-quadrature coefficient
    double cov_cs = 0.0;
};

// Weights are 1/sigma^2, or unit for points with sigma = 0. Throws an
// identifiability error when fewer than 3 phases are given or the design is
// rank deficient (e.g. only two distinct phases mod pi).
CosineFit fit_cosine(const std::vector<double>& phases, const std::vector<double>& intensities,
                     const std::vector<double>& sigmas);
CosineFit fit_cosine(const InterferogramRecord& record);

struct RecoveredPoint {
    Complex value{0.0, 0.0};
    double sigma_abs = 0.0;
    double sigma_arg = 0.0;
    double var_re = 0.0;
    double var_im = 0.0;
    double cov_re_im = 0.0;
};

// Complex ISF assembled from per-momentum interferogram fits,
// S = (B / 2 I0_bar) e^{i phi0} with I0_bar = 1 and arg S = phi0.
struct RecoveredISF {
    int sites = 0;
    std::vector<int> momentum_indices;
    std::vector<RecoveredPoint> points;
    double t_alpha = 0.0;
    double t_beta = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::string convention = "S = (B/2)*exp(i*phi0); arg S = phi0";
};

// Runs interferogram + fit_cosine for each requested momentum. Momentum k's
// record uses the stream derived from (seed, k), so any momentum subset of a
// scan reproduces the full scan's values.
RecoveredISF recover_isf_scan(const FockBasis& basis, const StateVector& psi,
                              const std::shared_ptr<const Spectral>& spectral,
                              const WavepacketPair& pair, const std::vector<double>& phase_grid,
                              const std::vector<int>& momentum_indices,
                              const std::optional<NoiseSpec>& noise, int threads = 1);

struct ImGammaEstimate {
    Vector value;
    Vector sigma;
};

// Inverse-transforms the recovered scan into Im Gamma(d) with linearly
// propagated uncertainties; requires every grid momentum exactly once.
ImGammaEstimate recover_im_gamma(const RecoveredISF& scan);

// CSV `p,re_S,im_S,sigma_abs,sigma_arg` plus a JSON sidecar carrying metadata
// and the phase-sign convention string.
std::string scan_to_csv(const RecoveredISF& scan, const std::vector<std::string>& extra_header = {});
std::string scan_sidecar_json(const RecoveredISF& scan, const std::string& tool_version,
                              std::uint64_t config_hash);

} // namespace qtdi
