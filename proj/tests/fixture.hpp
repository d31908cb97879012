#pragma once

// Frozen regression instance: L=4, N=2 hard-core chain, J=1, V=2,
// v=(0.3,-0.2,0.1,0), psi = (|1100> + |0110>)/sqrt(2), t1=0.3, t2=0.8.
// Pre-screened so the coherent part is large against Monte Carlo noise
// (max |Re Gamma| ~ 0.40), the classical symmetry is violated
// (max |Re S-| ~ 0.03) and |S| stays well away from zero at every momentum.
// Expected values computed by an independent dense-linear-algebra script.

#include <array>
#include <complex>

#include "qtdi/correlations.hpp"
#include "qtdi/dynamics.hpp"
#include "qtdi/hilbert.hpp"

namespace fixture {

inline constexpr int kSites = 4;
inline constexpr int kParticles = 2;
inline constexpr double kHopping = 1.0;
inline constexpr double kInteraction = 2.0;
inline constexpr std::array<double, 4> kPotentials{0.3, -0.2, 0.1, 0.0};
inline constexpr double kT1 = 0.3;
inline constexpr double kT2 = 0.8;

using C = std::complex<double>;

inline constexpr std::array<C, 4> kExpectedG{
    C{1.4186139536980178, -0.2656929964080800},
    C{0.7769012225221197, +0.0879025896944961},
    C{1.0174018237028013, +0.0601310103162925},
    C{0.7870830000770555, +0.1176593963972914},
};

inline constexpr std::array<double, 4> kExpectedGproj{
    1.5035305602739704,
    0.9391964499926768,
    0.6183984127808970,
    0.9388745769524527,
};

inline constexpr std::array<C, 4> kExpectedS{
    C{4.0000000000000000, 0.0000000000000000},
    C{0.4309689366980117, -0.3360057842793082},
    C{0.8720315548016440, -0.4111239721835749},
    C{0.3714553232924216, -0.3156422291694361},
};

struct Instance {
    qtdi::FockBasis basis;
    std::shared_ptr<const qtdi::Spectral> spectral;
    qtdi::StateVector psi;
};

inline Instance make() {
    qtdi::LatticeSpec lattice{kSites, kParticles, qtdi::Statistics::hardcore_boson};
    Instance inst;
    inst.basis = qtdi::FockBasis::build(lattice);
    qtdi::HamiltonianSpec hspec;
    hspec.hopping = kHopping;
    hspec.interaction = kInteraction;
    hspec.potentials = Eigen::Map<const qtdi::Vector>(kPotentials.data(), kSites);
    inst.spectral = qtdi::Spectral::decompose(qtdi::build_hamiltonian(inst.basis, hspec));
    inst.psi = qtdi::uniform_superposition(
        inst.basis, {qtdi::occupation_mask({1, 1, 0, 0}), qtdi::occupation_mask({0, 1, 1, 0})});
    return inst;
}

} // namespace fixture
