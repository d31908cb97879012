#pragma once

#include <memory>

#include "qtdi/hilbert.hpp"
#include "qtdi/types.hpp"

namespace qtdi {

// Nearest-neighbour lattice Hamiltonian, hbar = 1 and energies in units of the
// hopping scale:
//   H = -J sum_s (c+_s c_{s+1} + h.c.) + V sum_s n_s n_{s+1} + sum_s v_s n_s
// with periodic bonds; for L = 2 the single bond is counted once. Fermionic
// statistics adds the Jordan-Wigner sign to the hopping matrix elements.
struct HamiltonianSpec {
    double hopping = 1.0;
    double interaction = 0.0;
    Vector potentials; // empty means zero everywhere
};

MatrixC build_hamiltonian(const FockBasis& basis, const HamiltonianSpec& spec);

class Spectral;

// Dense unitary U(t) built from a spectral decomposition, which it keeps a
// handle to so that exact products like U(t2-t1) stay available downstream.
struct Propagator {
    double time = 0.0;
    MatrixC matrix;
    std::shared_ptr<const Spectral> spectral;
};

// Full Hermitian eigendecomposition of a Hamiltonian; the single factorization
// backs every propagator built from it.
class Spectral : public std::enable_shared_from_this<Spectral> {
public:
    // Throws ErrorCode::numeric if H deviates from Hermiticity beyond 1e-13.
    static std::shared_ptr<const Spectral> decompose(const MatrixC& hamiltonian);

    const Vector& eigenvalues() const { return eigenvalues_; }
    const MatrixC& eigenvectors() const { return eigenvectors_; }
    Eigen::Index dimension() const { return eigenvalues_.size(); }

    Propagator propagator(double time) const;

    // U(t) psi, with the unit norm of the result checked.
    StateVector evolve(const StateVector& psi, double time) const;

private:
    Spectral() = default;
    Vector eigenvalues_;
    MatrixC eigenvectors_;
};

// One-shot convenience: decompose H and return U(t).
Propagator propagator(const MatrixC& hamiltonian, double time);

// Heisenberg picture: U^dag op U.
MatrixC heisenberg(const MatrixC& op, const Propagator& u);

StateVector apply(const Propagator& u, const StateVector& psi);

// Shared-decomposition check used by every two-time correlator.
void require_shared_spectral(const Propagator& u1, const Propagator& u2);

} // namespace qtdi
