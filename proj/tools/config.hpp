#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "support.hpp"

namespace qtdi_cli {

enum class StateKind { fock, uniform, amplitudes };

// Fully resolved run configuration: one structured-text file plus flag
// overrides (flags win). The canonical serialization of the resolved values
// is hashed into every output header.
struct RunConfig {
    // [lattice]
    int sites = 0;
    int particles = 0;
    std::string statistics = "hardcore"; // hardcore | fermion

    // [hamiltonian]
    double hopping = 1.0;
    double interaction = 0.0;
    std::vector<double> potentials; // empty = flat

    // [state]
    StateKind state_kind = StateKind::fock;
    std::vector<int> occupations;              // fock: one 0/1 entry per site
    std::vector<std::vector<int>> configurations; // uniform
    std::vector<std::pair<double, double>> amplitudes; // explicit (re, im)

    // [times]
    double t1 = 0.0;
    double t2 = 1.0;

    // [scan]
    std::vector<int> momenta; // resolved; empty never survives validation
    bool momenta_all = true;
    int phases = 16;
    bool reconstruct = true;
    std::string records_dir; // recover: read records instead of generating

    // [noise]
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    // [output]
    std::string out_dir = "out";

    int threads = 1;

    std::string canonical() const;
    std::uint64_t hash() const { return fnv1a(canonical()); }
};

struct FlagOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::optional<int> phases;
    std::optional<std::string> momenta;
    std::optional<int> threads;
};

// Parses the INI-style config text ([section] + key = value lines). Errors
// carry the offending line number. `overrides` are applied afterwards and the
// momenta selection is resolved against the lattice size.
RunConfig parse_config(const std::string& text, const FlagOverrides& overrides);

} // namespace qtdi_cli
