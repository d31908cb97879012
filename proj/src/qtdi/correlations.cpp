#include "qtdi/correlations.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace qtdi {

namespace {

// Site-density eigenvalue table, row s = diagonal of n_s over the basis.
Matrix density_table(const FockBasis& basis) {
    const int L = basis.sites();
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Matrix table(L, dim);
    for (int s = 0; s < L; ++s)
        for (Eigen::Index i = 0; i < dim; ++i)
            table(s, i) = basis.occupation(static_cast<std::size_t>(i), s);
    return table;
}

void check_inputs(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                  const Propagator& u2) {
    require_shared_spectral(u1, u2);
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    if (psi.amplitudes.size() != dim || u1.matrix.rows() != dim)
        throw Error(ErrorCode::config, "state/propagator dimension does not match basis");
}

int wrap(int d, int L) { return ((d % L) + L) % L; }

struct GroupedSpectrum {
    std::vector<double> values;                    // group-mean eigenvalues
    std::vector<std::vector<Eigen::Index>> members; // eigenvector columns per group
    MatrixC vectors;
};

// Groups eigenvalues closer than 1e-9 so that near-degenerate subspaces act as
// a single projector; the splitting would otherwise depend on the arbitrary
// eigenvector choice inside a degenerate subspace.
GroupedSpectrum grouped_spectrum(const MatrixC& op) {
    const double dev = (op - op.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-12)
        throw Error(ErrorCode::numeric, "observable deviates from Hermiticity beyond tolerance");
    Eigen::SelfAdjointEigenSolver<MatrixC> solver(op);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::numeric, "eigendecomposition of observable failed");
    GroupedSpectrum g;
    g.vectors = solver.eigenvectors();
    const Vector& ev = solver.eigenvalues();
    constexpr double tol = 1e-9;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (!g.members.empty() && ev[k] - ev[g.members.back().back()] < tol) {
            g.members.back().push_back(k);
        } else {
            g.members.push_back({k});
        }
    }
    g.values.reserve(g.members.size());
    for (const auto& group : g.members) {
        double mean = 0.0;
        for (Eigen::Index k : group) mean += ev[k];
        g.values.push_back(mean / static_cast<double>(group.size()));
    }
    return g;
}

} // namespace

std::vector<double> momentum_grid(int sites) {
    if (sites < 1) throw Error(ErrorCode::grid, "momentum grid needs at least one site");
    std::vector<double> grid(sites);
    for (int m = 0; m < sites; ++m)
        grid[m] = 2.0 * std::numbers::pi * m / sites;
    return grid;
}

int negate_momentum_index(int m, int sites) {
    if (m < 0 || m >= sites) throw Error(ErrorCode::grid, "momentum index off the lattice grid");
    return (sites - m) % sites;
}

VectorC forward_dft(const VectorC& values) {
    const auto L = values.size();
    VectorC out(L);
    for (Eigen::Index m = 0; m < L; ++m) {
        Complex acc(0.0, 0.0);
        for (Eigen::Index d = 0; d < L; ++d)
            acc += values[d] * std::exp(Complex(0.0, 2.0 * std::numbers::pi * m * d / L));
        out[m] = acc;
    }
    return out;
}

VectorC inverse_dft(const VectorC& values) {
    const auto L = values.size();
    VectorC out(L);
    for (Eigen::Index d = 0; d < L; ++d) {
        Complex acc(0.0, 0.0);
        for (Eigen::Index m = 0; m < L; ++m)
            acc += values[m] * std::exp(Complex(0.0, -2.0 * std::numbers::pi * m * d / L));
        out[d] = acc / static_cast<double>(L);
    }
    return out;
}

VectorC dcf_all(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                const Propagator& u2) {
    check_inputs(basis, psi, u1, u2);
    const int L = basis.sites();
    const Matrix n = density_table(basis);
    // G(d) = sum_s <psi|U1+ n_s U1 U2+ n_{s+d} U2|psi>
    //      = sum_s (n_s . a)+ W (n_{s+d} . b),  W = U(t1 - t2)
    const VectorC a = u1.matrix * psi.amplitudes;
    const VectorC b = u2.matrix * psi.amplitudes;
    const MatrixC w = u1.spectral->propagator(u1.time - u2.time).matrix;
    VectorC g = VectorC::Zero(L);
    for (int s = 0; s < L; ++s) {
        const VectorC x = a.cwiseProduct(n.row(s).transpose().cast<Complex>());
        const VectorC left = w.adjoint() * x; // x+ W y == left.dot(y)
        for (int d = 0; d < L; ++d) {
            const int s2 = wrap(s + d, L);
            g[d] += left.dot(b.cwiseProduct(n.row(s2).transpose().cast<Complex>()));
        }
    }
    return g;
}

Complex dcf(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
            const Propagator& u2, int displacement) {
    if (displacement < 0 || displacement >= basis.sites())
        throw Error(ErrorCode::index, "displacement out of range");
    return dcf_all(basis, psi, u1, u2)[displacement];
}

VectorC isf_all(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                const Propagator& u2) {
    return forward_dft(dcf_all(basis, psi, u1, u2));
}

Complex isf(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
            const Propagator& u2, int momentum_index) {
    if (momentum_index < 0 || momentum_index >= basis.sites())
        throw Error(ErrorCode::grid, "momentum index off the lattice grid");
    return isf_all(basis, psi, u1, u2)[momentum_index];
}

CorrelationSplit split_generic(const MatrixC& a, const MatrixC& b, const StateVector& psi,
                               const Propagator& u1, const Propagator& u2) {
    require_shared_spectral(u1, u2);
    if (a.rows() != u1.matrix.rows() || b.rows() != u1.matrix.rows())
        throw Error(ErrorCode::config, "observable dimension does not match propagator");

    const GroupedSpectrum ga = grouped_spectrum(a);
    const VectorC evolved = u1.matrix * psi.amplitudes;
    const VectorC coeff = ga.vectors.adjoint() * evolved; // components in A's eigenbasis

    CorrelationSplit split;
    split.total = psi.amplitudes.dot(u1.matrix.adjoint() * a * u1.matrix *
                                     (u2.matrix.adjoint() * (b * (u2.matrix * psi.amplitudes))));

    const MatrixC b_t2 = u2.matrix.adjoint() * b * u2.matrix;
    Complex projective(0.0, 0.0);
    for (std::size_t j = 0; j < ga.members.size(); ++j) {
        // psi_j = U1+ Pi_j U1 psi restricted to group j
        VectorC masked = VectorC::Zero(coeff.size());
        for (Eigen::Index k : ga.members[j]) masked[k] = coeff[k];
        const VectorC psi_j = u1.matrix.adjoint() * (ga.vectors * masked);
        projective += ga.values[j] * psi_j.dot(b_t2 * psi_j);
    }
    split.projective = projective;
    split.coherent = split.total - split.projective;

#ifndef NDEBUG
    if (a.rows() <= 24) {
        const CorrelationSplit ref = split_generic_explicit(a, b, psi, u1, u2);
        assert(std::abs(split.coherent - ref.coherent) < 1e-9);
    }
#endif
    return split;
}

CorrelationSplit split_generic_explicit(const MatrixC& a, const MatrixC& b,
                                        const StateVector& psi, const Propagator& u1,
                                        const Propagator& u2) {
    require_shared_spectral(u1, u2);
    const GroupedSpectrum ga = grouped_spectrum(a);
    const GroupedSpectrum gb = grouped_spectrum(b);
    const auto dim = a.rows();

    auto projector = [dim](const GroupedSpectrum& g, std::size_t group) {
        MatrixC pi = MatrixC::Zero(dim, dim);
        for (Eigen::Index k : g.members[group]) {
            pi += g.vectors.col(k) * g.vectors.col(k).adjoint();
        }
        return pi;
    };

    std::vector<MatrixC> pi_a(ga.members.size()), pi_b(gb.members.size());
    for (std::size_t j = 0; j < ga.members.size(); ++j)
        pi_a[j] = u1.matrix.adjoint() * projector(ga, j) * u1.matrix;
    for (std::size_t l = 0; l < gb.members.size(); ++l)
        pi_b[l] = u2.matrix.adjoint() * projector(gb, l) * u2.matrix;

    CorrelationSplit split;
    for (std::size_t j = 0; j < ga.members.size(); ++j) {
        for (std::size_t m = 0; m < ga.members.size(); ++m) {
            for (std::size_t l = 0; l < gb.members.size(); ++l) {
                const Complex term =
                    ga.values[j] * gb.values[l] *
                    psi.amplitudes.dot(pi_a[j] * (pi_b[l] * (pi_a[m] * psi.amplitudes)));
                split.total += term;
                if (j == m)
                    split.projective += term;
                else
                    split.coherent += term;
            }
        }
    }
    return split;
}

std::vector<CorrelationSplit> split_dcf_all(const FockBasis& basis, const StateVector& psi,
                                            const Propagator& u1, const Propagator& u2) {
    check_inputs(basis, psi, u1, u2);
    const int L = basis.sites();
    const Matrix n = density_table(basis);

    const VectorC c = u1.matrix * psi.amplitudes; // c_j(t1) = <j|U(t1)|psi>
    const MatrixC t = u1.spectral->propagator(u2.time - u1.time).matrix;
    const Matrix p = t.cwiseAbs2(); // |<l|U(t2-t1)|j>|^2
    const Vector prob = c.cwiseAbs2();
    const VectorC v = t * c;

    VectorC total = VectorC::Zero(L);
    Vector projective = Vector::Zero(L);
    for (int s = 0; s < L; ++s) {
        const Vector ns = n.row(s).transpose();
        const VectorC u_s = t * c.cwiseProduct(ns.cast<Complex>());
        const Vector r_s = p * prob.cwiseProduct(ns);
        for (int d = 0; d < L; ++d) {
            const Vector n2 = n.row(wrap(s + d, L)).transpose();
            total[d] += u_s.dot(v.cwiseProduct(n2.cast<Complex>()));
            projective[d] += n2.dot(r_s);
        }
    }

    std::vector<CorrelationSplit> out(L);
    for (int d = 0; d < L; ++d) {
        out[d].total = total[d];
        out[d].projective = Complex(projective[d], 0.0);
        out[d].coherent = total[d] - out[d].projective;
    }
#ifndef NDEBUG
    if (basis.dimension() <= 24) {
        for (int d = 0; d < L; ++d) {
            const Complex ref = coherent_dcf_explicit(basis, psi, u1, u2, d);
            assert(std::abs(out[d].coherent - ref) < 1e-9);
        }
    }
#endif
    return out;
}

CorrelationSplit split_dcf(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                           const Propagator& u2, int displacement) {
    if (displacement < 0 || displacement >= basis.sites())
        throw Error(ErrorCode::index, "displacement out of range");
    return split_dcf_all(basis, psi, u1, u2)[static_cast<std::size_t>(displacement)];
}

Complex coherent_dcf_explicit(const FockBasis& basis, const StateVector& psi,
                              const Propagator& u1, const Propagator& u2, int displacement) {
    check_inputs(basis, psi, u1, u2);
    const int L = basis.sites();
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    const Matrix n = density_table(basis);
    const VectorC c = u1.matrix * psi.amplitudes;
    const MatrixC t = u1.spectral->propagator(u2.time - u1.time).matrix;

    Complex gamma(0.0, 0.0);
    for (int s = 0; s < L; ++s) {
        const int s2 = wrap(s + displacement, L);
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (n(s, j) == 0.0) continue;
            for (Eigen::Index m = 0; m < dim; ++m) {
                if (m == j) continue;
                for (Eigen::Index l = 0; l < dim; ++l) {
                    if (n(s2, l) == 0.0) continue;
                    gamma += n(s, j) * n(s2, l) * std::conj(c[j]) * c[m] * std::conj(t(l, j)) *
                             t(l, m);
                }
            }
        }
    }
    return gamma;
}

std::vector<CorrelationSplit> isf_split_all(const FockBasis& basis, const StateVector& psi,
                                            const Propagator& u1, const Propagator& u2) {
    const auto splits = split_dcf_all(basis, psi, u1, u2);
    const int L = basis.sites();
    VectorC proj(L), coh(L), total(L);
    for (int d = 0; d < L; ++d) {
        proj[d] = splits[d].projective;
        coh[d] = splits[d].coherent;
        total[d] = splits[d].total;
    }
    const VectorC s_proj = forward_dft(proj);
    const VectorC s_coh = forward_dft(coh);
    const VectorC s_total = forward_dft(total);
    std::vector<CorrelationSplit> out(L);
    for (int m = 0; m < L; ++m) {
        out[m].projective = s_proj[m];
        out[m].coherent = s_coh[m];
        out[m].total = s_total[m];
    }
    return out;
}

CorrelationSplit isf_split(const FockBasis& basis, const StateVector& psi, const Propagator& u1,
                           const Propagator& u2, int momentum_index) {
    if (momentum_index < 0 || momentum_index >= basis.sites())
        throw Error(ErrorCode::grid, "momentum index off the lattice grid");
    return isf_split_all(basis, psi, u1, u2)[static_cast<std::size_t>(momentum_index)];
}

std::pair<Complex, Complex> isf_sym_parts(Complex s_plus_p, Complex s_minus_p) {
    return {0.5 * (s_plus_p + s_minus_p), 0.5 * (s_plus_p - s_minus_p)};
}

Vector reconstruct_im_gamma(const VectorC& isf_grid) {
    const auto L = isf_grid.size();
    if (L < 1) throw Error(ErrorCode::grid, "ISF grid is empty");
    VectorC f(L);
    for (Eigen::Index m = 0; m < L; ++m) {
        const Eigen::Index neg = (L - m) % L;
        const auto [s_plus, s_minus] = isf_sym_parts(isf_grid[m], isf_grid[neg]);
        f[m] = Complex(s_plus.imag(), -s_minus.real());
    }
    const VectorC gamma = inverse_dft(f);
    if (gamma.imag().cwiseAbs().maxCoeff() > 1e-10)
        throw Error(ErrorCode::numeric,
                    "Im Gamma reconstruction produced a non-real result; ISF grid inconsistent");
    return gamma.real();
}

SymmetryReport symmetry_check(const FockBasis& basis, const StateVector& psi,
                              const Propagator& u1, const Propagator& u2) {
    const int L = basis.sites();
    const VectorC g12 = dcf_all(basis, psi, u1, u2);
    const VectorC g21 = dcf_all(basis, psi, u2, u1);
    const VectorC s12 = forward_dft(g12);
    const VectorC s21 = forward_dft(g21);

    SymmetryReport report;
    for (int m = 0; m < L; ++m) {
        report.quantum_isf =
            std::max(report.quantum_isf, std::abs(std::conj(s12[m]) - s21[m]));
        report.classical_isf = std::max(
            report.classical_isf, std::abs(std::conj(s12[m]) - s12[negate_momentum_index(m, L)]));
    }
    for (int d = 0; d < L; ++d)
        report.quantum_dcf =
            std::max(report.quantum_dcf, std::abs(std::conj(g12[d]) - g21[wrap(L - d, L)]));
    return report;
}

} // namespace qtdi
