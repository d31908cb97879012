#include "qtdi/dynamics.hpp"

#include <bit>
#include <cmath>

namespace qtdi {

namespace {

constexpr double kHermitianTol = 1e-13;

// Sign of c_site acting on |mask>: parity of the occupied modes below `site`
// in the 0..L-1 mode ordering.
double jordan_wigner_sign(std::uint64_t mask, int site) {
    const std::uint64_t below = mask & ((std::uint64_t{1} << site) - 1);
    return (std::popcount(below) % 2 == 0) ? 1.0 : -1.0;
}

} // namespace

MatrixC build_hamiltonian(const FockBasis& basis, const HamiltonianSpec& spec) {
    const int L = basis.sites();
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Vector v = spec.potentials;
    if (v.size() == 0) v = Vector::Zero(L);
    if (v.size() != L)
        throw Error(ErrorCode::config, "potential list length does not match lattice size");
    const bool fermionic = basis.lattice().statistics == Statistics::spinless_fermion;

    // L = 2 periodic would traverse the same bond twice; count it once.
    std::vector<std::pair<int, int>> bonds;
    for (int s = 0; s < L; ++s) {
        if (L == 2 && s == 1) break;
        if (L == 1) break;
        bonds.emplace_back(s, (s + 1) % L);
    }

    MatrixC h = MatrixC::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const std::uint64_t m = basis.mask(static_cast<std::size_t>(i));
        double diag = 0.0;
        for (int s = 0; s < L; ++s)
            if ((m >> s) & 1U) diag += v[s];
        for (const auto& [a, b] : bonds)
            if (((m >> a) & 1U) && ((m >> b) & 1U)) diag += spec.interaction;
        h(i, i) = diag;

        for (const auto& [a, b] : bonds) {
            for (const auto& [src, dst] : {std::pair{a, b}, std::pair{b, a}}) {
                if (!((m >> src) & 1U) || ((m >> dst) & 1U)) continue;
                // matrix element <m'| c+_dst c_src |m>
                double amp = -spec.hopping;
                std::uint64_t mid = m & ~(std::uint64_t{1} << src);
                if (fermionic)
                    amp *= jordan_wigner_sign(m, src) * jordan_wigner_sign(mid, dst);
                const std::uint64_t m2 = mid | (std::uint64_t{1} << dst);
                const auto j = static_cast<Eigen::Index>(basis.index_of(m2));
                h(j, i) += amp;
            }
        }
    }

    const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermitianTol)
        throw Error(ErrorCode::numeric, "assembled Hamiltonian is not Hermitian");
    return h;
}

std::shared_ptr<const Spectral> Spectral::decompose(const MatrixC& hamiltonian) {
    if (hamiltonian.rows() != hamiltonian.cols())
        throw Error(ErrorCode::numeric, "Hamiltonian must be square");
    const double dev = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermitianTol)
        throw Error(ErrorCode::numeric, "matrix deviates from Hermiticity beyond tolerance");
    Eigen::SelfAdjointEigenSolver<MatrixC> solver(hamiltonian);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::numeric, "eigendecomposition failed");
    auto spectral = std::shared_ptr<Spectral>(new Spectral());
    spectral->eigenvalues_ = solver.eigenvalues();
    spectral->eigenvectors_ = solver.eigenvectors();
    return spectral;
}

Propagator Spectral::propagator(double time) const {
    // U(t) = sum_k e^{-i E_k t} |k><k|
    VectorC phases(eigenvalues_.size());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
        phases[k] = std::exp(Complex(0.0, -eigenvalues_[k] * time));
    Propagator u;
    u.time = time;
    u.matrix = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
    u.spectral = shared_from_this();
    return u;
}

StateVector Spectral::evolve(const StateVector& psi, double time) const {
    if (psi.amplitudes.size() != dimension())
        throw Error(ErrorCode::config, "state dimension does not match Hamiltonian");
    StateVector out;
    out.amplitudes = propagator(time).matrix * psi.amplitudes;
    if (std::abs(out.amplitudes.norm() - 1.0) > 1e-12)
        throw Error(ErrorCode::numeric, "evolution failed to preserve the state norm");
    return out;
}

Propagator propagator(const MatrixC& hamiltonian, double time) {
    return Spectral::decompose(hamiltonian)->propagator(time);
}

MatrixC heisenberg(const MatrixC& op, const Propagator& u) {
    if (op.rows() != u.matrix.rows() || op.cols() != u.matrix.cols())
        throw Error(ErrorCode::config, "operator dimension does not match propagator");
    return u.matrix.adjoint() * op * u.matrix;
}

StateVector apply(const Propagator& u, const StateVector& psi) {
    if (psi.amplitudes.size() != u.matrix.rows())
        throw Error(ErrorCode::config, "state dimension does not match propagator");
    StateVector out;
    out.amplitudes = u.matrix * psi.amplitudes;
    return out;
}

void require_shared_spectral(const Propagator& u1, const Propagator& u2) {
    if (!u1.spectral || !u2.spectral || u1.spectral != u2.spectral)
        throw Error(ErrorCode::config,
                    "propagators must come from the same spectral decomposition");
}

} // namespace qtdi
