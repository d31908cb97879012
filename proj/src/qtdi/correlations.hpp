#pragma once

#include <vector>

#include "qtdi/dynamics.hpp"
#include "qtdi/hilbert.hpp"
#include "qtdi/types.hpp"

namespace qtdi {

// Allowed lattice momenta p_m = 2*pi*m/L, m = 0..L-1; closed under negation
// modulo 2*pi (index of -p_m is (L-m) mod L).
std::vector<double> momentum_grid(int sites);
int negate_momentum_index(int m, int sites);

// Two-time density correlation, G(d,t1,t2) = sum_s <psi| n_s(t1) n_{s+d}(t2) |psi>
// with operators in the Heisenberg picture and periodic displacement d.
Complex dcf(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
            const Propagator& u2, int displacement);
VectorC dcf_all(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                const Propagator& u2);

// Intermediate scattering function, S(p,t1,t2) = sum_d G(d,t1,t2) e^{+i p d};
// the inverse transform carries 1/L and e^{-i p d}.
Complex isf(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
            const Propagator& u2, int momentum_index);
VectorC isf_all(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                const Propagator& u2);

VectorC forward_dft(const VectorC& values);
VectorC inverse_dft(const VectorC& values);

// Splitting of a two-time correlator into the part reproducible by two
// consecutive projective measurements and the remainder carried by the
// coherences of the state at the first measurement time.
struct CorrelationSplit {
    Complex projective{0.0, 0.0};
    Complex coherent{0.0, 0.0};
    Complex total{0.0, 0.0};
};

// Generic observables A, B (Hermitian). Eigenvalues are grouped with absolute
// tolerance 1e-9 and the splitting operates on the grouped eigenprojectors.
// `coherent` is returned as total - projective; the explicit j != m sum is the
// slow cross-check below.
CorrelationSplit split_generic(const MatrixC& a, const MatrixC& b, const StateVector& psi,
                               const Propagator& u1, const Propagator& u2);

// O(dim^3)-per-group reference path evaluating the explicit projector sums.
CorrelationSplit split_generic_explicit(const MatrixC& a, const MatrixC& b,
                                        const StateVector& psi, const Propagator& u1,
                                        const Propagator& u2);

// DCF specialization: the first measurement projects onto full occupation
// configurations (the joint eigenbasis of every site density), so
//   Gproj(d) = sum_s sum_{j,l} n_s[j] n_{s+d}[l] |c_j(t1)|^2 |<l|U(t2-t1)|j>|^2
// with c_j(t1) = <j|U(t1)|psi>, and Gamma = G - Gproj.
CorrelationSplit split_dcf(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                           const Propagator& u2, int displacement);
std::vector<CorrelationSplit> split_dcf_all(const FockBasis& basis, const StateVector& psi,
                                            const Propagator& u1, const Propagator& u2);

// Explicit j != m configuration sum for the coherent part; reference path.
Complex coherent_dcf_explicit(const FockBasis& basis, const StateVector& psi,
                              const Propagator& u1, const Propagator& u2, int displacement);

// Fourier transform of the split, S = S_proj + S_coh at one grid momentum.
CorrelationSplit isf_split(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                           const Propagator& u2, int momentum_index);
std::vector<CorrelationSplit> isf_split_all(const FockBasis& basis, const StateVector& psi,
                                            const Propagator& u1, const Propagator& u2);

// Symmetric / antisymmetric combination under p -> -p: S± = [S(p) ± S(-p)]/2.
std::pair<Complex, Complex> isf_sym_parts(Complex s_plus_p, Complex s_minus_p);

// Recovers Im Gamma(d) from ISF values on the full momentum grid. Per momentum
// the data enter through Im[S+](p) and Re[S-](p), which assemble the transform
// of Im Gamma as F(p) = Im[S+](p) - i Re[S-](p); the result is its inverse DFT,
// real within 1e-10 (asserted).
Vector reconstruct_im_gamma(const VectorC& isf_grid);

struct SymmetryReport {
    double quantum_isf = 0.0;      // max |S(p,t1,t2)* - S(p,t2,t1)|
    double quantum_dcf = 0.0;      // max |G(d,t1,t2)* - G(-d,t2,t1)|
    double classical_isf = 0.0;    // max |S(p,t1,t2)* - S(-p,t1,t2)|, diagnostic
};

// Quantum symmetries must hold for any target; a nonzero classical violation
// signals a coherent contribution to the correlations.
SymmetryReport symmetry_check(const FockBasis& basis, const StateVector& psi,
                              const Propagator& u1, const Propagator& u2);

} // namespace qtdi
