#include "qtdi/hilbert.hpp"

#include <cmath>

namespace qtdi {

namespace {

std::vector<std::uint64_t> enumerate_masks(int sites, int particles) {
    // Occupied-site combinations in increasing lexicographic order; pins the
    // deterministic basis ordering |10>, |01> for (L=2, N=1).
    std::vector<std::uint64_t> masks;
    std::vector<int> occ(particles);
    for (int i = 0; i < particles; ++i) occ[i] = i;
    while (true) {
        std::uint64_t m = 0;
        for (int s : occ) m |= (std::uint64_t{1} << s);
        masks.push_back(m);
        if (particles == 0) break;
        int k = particles - 1;
        while (k >= 0 && occ[k] == sites - particles + k) --k;
        if (k < 0) break;
        ++occ[k];
        for (int i = k + 1; i < particles; ++i) occ[i] = occ[i - 1] + 1;
    }
    return masks;
}

} // namespace

void LatticeSpec::validate() const {
    if (sites < 1) throw Error(ErrorCode::config, "lattice must have at least one site");
    if (sites > 62) throw Error(ErrorCode::config, "lattice size exceeds bitmask capacity");
    if (particles < 0) throw Error(ErrorCode::config, "particle number must be non-negative");
    if (particles > sites)
        throw Error(ErrorCode::capacity, "particle number " + std::to_string(particles) +
                                             " exceeds hard-core capacity of " +
                                             std::to_string(sites) + " sites");
}

FockBasis FockBasis::build(const LatticeSpec& spec) {
    spec.validate();
    FockBasis basis;
    basis.spec_ = spec;
    basis.masks_ = enumerate_masks(spec.sites, spec.particles);
    basis.index_.reserve(basis.masks_.size());
    for (std::size_t i = 0; i < basis.masks_.size(); ++i) basis.index_[basis.masks_[i]] = i;
    return basis;
}

std::uint64_t FockBasis::mask(std::size_t index) const {
    if (index >= masks_.size()) throw Error(ErrorCode::index, "basis index out of range");
    return masks_[index];
}

int FockBasis::occupation(std::size_t index, int site) const {
    if (site < 0 || site >= spec_.sites) throw Error(ErrorCode::index, "site out of range");
    return static_cast<int>((mask(index) >> site) & 1U);
}

std::vector<int> FockBasis::occupation_vector(std::size_t index) const {
    const std::uint64_t m = mask(index);
    std::vector<int> occ(spec_.sites);
    for (int s = 0; s < spec_.sites; ++s) occ[s] = static_cast<int>((m >> s) & 1U);
    return occ;
}

std::size_t FockBasis::index_of(std::uint64_t mask) const {
    auto it = index_.find(mask);
    if (it == index_.end()) throw Error(ErrorCode::index, "occupation vector not in basis");
    return it->second;
}

bool FockBasis::contains(std::uint64_t mask) const { return index_.count(mask) > 0; }

MatrixC DensityOperator::matrix() const {
    MatrixC m = MatrixC::Zero(diagonal.size(), diagonal.size());
    m.diagonal() = diagonal.cast<Complex>();
    return m;
}

DensityOperator density_operator(const FockBasis& basis, int site) {
    if (site < 0 || site >= basis.sites()) throw Error(ErrorCode::index, "site out of range");
    DensityOperator op;
    op.site = site;
    op.diagonal = Vector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        op.diagonal[static_cast<Eigen::Index>(i)] = basis.occupation(i, site);
    return op;
}

StateVector fock_state(const FockBasis& basis, std::uint64_t mask) {
    const std::size_t i = basis.index_of(mask);
    StateVector psi;
    psi.amplitudes = VectorC::Zero(static_cast<Eigen::Index>(basis.dimension()));
    psi.amplitudes[static_cast<Eigen::Index>(i)] = 1.0;
    return psi;
}

StateVector fock_state(const FockBasis& basis, const std::vector<int>& occupations) {
    if (static_cast<int>(occupations.size()) != basis.sites())
        throw Error(ErrorCode::config, "occupation list length does not match lattice size");
    return fock_state(basis, occupation_mask(occupations));
}

StateVector uniform_superposition(const FockBasis& basis, const std::vector<std::uint64_t>& masks) {
    if (masks.empty())
        throw Error(ErrorCode::config, "uniform superposition needs at least one configuration");
    StateVector psi;
    psi.amplitudes = VectorC::Zero(static_cast<Eigen::Index>(basis.dimension()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(masks.size()));
    for (std::uint64_t m : masks) {
        const auto i = static_cast<Eigen::Index>(basis.index_of(m));
        if (psi.amplitudes[i] != 0.0)
            throw Error(ErrorCode::config, "duplicate configuration in uniform superposition");
        psi.amplitudes[i] = amp;
    }
    return psi;
}

StateVector state_from_amplitudes(const FockBasis& basis, const VectorC& amplitudes,
                                  bool* renormalized) {
    if (static_cast<std::size_t>(amplitudes.size()) != basis.dimension())
        throw Error(ErrorCode::config, "amplitude list length does not match basis dimension");
    const double norm = amplitudes.norm();
    if (norm <= 0.0) throw Error(ErrorCode::config, "state amplitudes are all zero");
    StateVector psi;
    psi.amplitudes = amplitudes / norm;
    if (renormalized) *renormalized = std::abs(norm - 1.0) > 1e-9;
    return psi;
}

std::uint64_t occupation_mask(const std::vector<int>& occupations) {
    std::uint64_t m = 0;
    for (std::size_t s = 0; s < occupations.size(); ++s) {
        if (occupations[s] != 0 && occupations[s] != 1)
            throw Error(ErrorCode::config, "occupations must be 0 or 1");
        if (occupations[s]) m |= (std::uint64_t{1} << s);
    }
    return m;
}

} // namespace qtdi
