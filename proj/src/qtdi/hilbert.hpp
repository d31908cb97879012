#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qtdi/types.hpp"

namespace qtdi {

enum class Statistics { hardcore_boson, spinless_fermion };

// One-dimensional periodic lattice of L sites holding N hard-core particles
// (occupancy 0 or 1 per site).
struct LatticeSpec {
    int sites = 1;
    int particles = 0;
    Statistics statistics = Statistics::hardcore_boson;

    void validate() const;
};

// Occupation-number basis of the fixed-N sector. Configurations are stored as
// bitmasks (bit s = occupation of site s) and ordered so that the occupied-site
// lists are lexicographically increasing: (L=2,N=1) enumerates |10>, |01>.
class FockBasis {
public:
    static FockBasis build(const LatticeSpec& spec);

    const LatticeSpec& lattice() const { return spec_; }
    std::size_t dimension() const { return masks_.size(); }
    int sites() const { return spec_.sites; }
    int particles() const { return spec_.particles; }

    std::uint64_t mask(std::size_t index) const;
    int occupation(std::size_t index, int site) const;
    std::vector<int> occupation_vector(std::size_t index) const;
    std::size_t index_of(std::uint64_t mask) const;
    bool contains(std::uint64_t mask) const;

private:
    LatticeSpec spec_;
    std::vector<std::uint64_t> masks_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

// Site density n_s, diagonal in the Fock basis with eigenvalues in {0,1}.
struct DensityOperator {
    int site = 0;
    Vector diagonal;

    MatrixC matrix() const;
};

DensityOperator density_operator(const FockBasis& basis, int site);

// Many-body state; unit norm is checked at construction (1e-12).
struct StateVector {
    VectorC amplitudes;

    double norm() const { return amplitudes.norm(); }
};

StateVector fock_state(const FockBasis& basis, std::uint64_t mask);
StateVector fock_state(const FockBasis& basis, const std::vector<int>& occupations);
StateVector uniform_superposition(const FockBasis& basis, const std::vector<std::uint64_t>& masks);

// Builds a state from explicit amplitudes; renormalizes when the input norm
// deviates from 1 and reports that through `renormalized` if non-null.
StateVector state_from_amplitudes(const FockBasis& basis, const VectorC& amplitudes,
                                  bool* renormalized = nullptr);

std::uint64_t occupation_mask(const std::vector<int>& occupations);

} // namespace qtdi
