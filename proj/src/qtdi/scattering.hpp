#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qtdi/correlations.hpp"
#include "qtdi/types.hpp"

namespace qtdi {

enum class Envelope { gaussian, rectangular };

// L2-normalized envelope amplitude at offset x from the packet center;
// gaussian uses width sigma, rectangular is flat on [-sigma, sigma].
double envelope_value(Envelope shape, double width, double x);

// Two interfering wavepackets arriving at t_alpha < t_beta, travelling at
// c = 1 with controllable carrier phases.
struct WavepacketPair {
    Envelope shape = Envelope::gaussian;
    double width = 1.0;
    double t_alpha = 0.0;
    double t_beta = 1.0;
    double phi_alpha = 0.0;
    double phi_beta = 0.0;
    bool equal_shape = true;

    void validate() const;
    // Envelopes separated by more than 6 sigma cannot interfere after
    // scattering unless re-overlapped.
    bool non_overlapping() const;
};

// `overlapped` sets the two scattered envelope factors identical (equal-shape
// packets after the overlap stage); `raw` keeps them at their own arrival
// offsets so the which-time information survives. All dimensional prefactors
// are folded into I0_bar = 1.
enum class OverlapMode { overlapped, raw };

struct DetectorConfig {
    int momentum_index = 0;
    OverlapMode mode = OverlapMode::overlapped;
};

// The three ISF values entering the two-channel intensity.
struct IsfInputs {
    Complex s_alpha_alpha;
    Complex s_beta_beta;
    Complex s_alpha_beta;
};

// Detected intensity at detection offset x = R - ct:
//   I = |alpha(x)|^2 S(p,ta,ta) + |beta(x)|^2 S(p,tb,tb)
//       + 2 Re[ alpha(x)* beta(x) e^{i(phi_b - phi_a)} S(p,ta,tb) ]
// Clamps tiny negative rounding to zero; a genuinely negative value signals
// inconsistent ISF inputs and throws.
double intensity(const IsfInputs& isf, const WavepacketPair& pair, const DetectorConfig& config,
                 double detection_offset);

struct InterferogramPoint {
    double phi = 0.0;
    double intensity = 0.0;
    double sigma = 0.0;
};

struct InterferogramRecord {
    std::vector<InterferogramPoint> points;
    double momentum = 0.0;
    int momentum_index = 0;
    double t_alpha = 0.0;
    double t_beta = 0.0;
    std::uint64_t shots = 0; // 0 = noiseless
    std::uint64_t seed = 0;

    void validate() const;
};

struct NoiseSpec {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

std::vector<double> uniform_phase_grid(int n_phases);

// Phase scan of the overlapped-mode intensity
//   I(phi) = S(p,ta,ta) + S(p,tb,tb) + 2|S(p,ta,tb)| cos(phi + arg S(p,ta,tb))
// at fixed momentum. With noise, each point is an independent Poisson draw
// with mean shots*I scaled back by 1/shots; sigma = sqrt(max(I, 1/shots)/shots)
// (one-count floor so exact zeros keep a finite weight). Point i draws from a
// stream derived from (seed, i), so parallel and serial runs agree exactly.
InterferogramRecord interferogram(const FockBasis& basis, const StateVector& psi,
                                  const std::shared_ptr<const Spectral>& spectral,
                                  const WavepacketPair& pair, const DetectorConfig& config,
                                  const std::vector<double>& phase_grid,
                                  const std::optional<NoiseSpec>& noise, int threads = 1);

// Same scan given precomputed ISF inputs (used per momentum by recovery).
InterferogramRecord interferogram_from_isf(const IsfInputs& isf, int momentum_index, int sites,
                                           const WavepacketPair& pair,
                                           const std::vector<double>& phase_grid,
                                           const std::optional<NoiseSpec>& noise,
                                           int threads = 1);

// CSV form: '#'-prefixed metadata comments, then `phi,intensity,sigma` rows.
// extra_header lines (already '#'-prefixed by the caller) are emitted first.
std::string record_to_csv(const InterferogramRecord& record,
                          const std::vector<std::string>& extra_header = {});
InterferogramRecord record_from_csv(const std::string& text);

} // namespace qtdi
