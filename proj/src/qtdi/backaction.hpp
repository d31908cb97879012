#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtdi/recovery.hpp"
#include "qtdi/types.hpp"

namespace qtdi {

// Monte Carlo outcome of two consecutive projective density measurements:
// per run, the state evolved to t1 collapses onto a full occupation
// configuration, evolves on to t2 and collapses again; the correlator
// estimate is the run average of sum_s n_s(first) n_{s+d}(second).
struct ProtocolResult {
    Matrix joint_probabilities; // (first config j, second config l) frequencies
    Vector first_marginal;      // frequencies of the first outcome
    Vector correlator;          // C_hat(d)
    Vector standard_error;      // sample SE of C_hat(d)
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

// Shot k draws from the stream derived from (seed, k); chunked accumulation
// makes parallel and serial runs bit-identical.
ProtocolResult run_projective_protocol(const FockBasis& basis, const StateVector& psi,
                                       const std::shared_ptr<const Spectral>& spectral,
                                       double t1, double t2, std::uint64_t shots,
                                       std::uint64_t seed, int threads = 1);

struct DisplacementComparison {
    int displacement = 0;
    Complex exact_total{0.0, 0.0};     // G(d)
    double exact_projective = 0.0;     // Gproj(d)
    Complex exact_coherent{0.0, 0.0};  // Gamma(d)
    double mc_estimate = 0.0;
    double mc_standard_error = 0.0;
    Complex qtdi_recovered{0.0, 0.0};  // G(d) from the noiseless phase-scan round trip
    bool mc_matches_projective = false; // |C_hat - Gproj| < 4 SE
    bool mc_matches_total = false;      // |C_hat - Re G| < 4 SE
};

struct ComparisonReport {
    std::vector<DisplacementComparison> rows;
    double t1 = 0.0;
    double t2 = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    double max_qtdi_error = 0.0; // max_d |qtdi_recovered - exact_total|
};

// Contrasts the consecutive-measurement channel against the phase-scan
// recovery channel on the same target: the former converges to the projective
// part only, the latter reproduces the full correlator.
ComparisonReport compare_protocols(const FockBasis& basis, const StateVector& psi,
                                   const std::shared_ptr<const Spectral>& spectral, double t1,
                                   double t2, std::uint64_t shots, std::uint64_t seed,
                                   int phase_count = 16, int threads = 1);

std::string report_to_json(const ComparisonReport& report, const std::string& tool_version,
                           std::uint64_t config_hash);
std::string report_table(const ComparisonReport& report);

} // namespace qtdi
