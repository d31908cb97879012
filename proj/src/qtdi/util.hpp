#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace qtdi {

// splitmix64 finalizer; fixed constants from the reference implementation.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from (seed, index). Used to give each
// interferogram point, each Monte Carlo shot and each momentum in a scan its
// own generator, so parallel and serial sweeps produce identical output.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index);

// Uniform double in [0,1) from the top 53 bits of one engine draw.
double uniform_unit(std::mt19937_64& eng);

std::int64_t poisson_draw(std::mt19937_64& eng, double mean);

// Runs fn(i) for i in [0,n). With threads > 1, indices are distributed over
// std::async workers; fn must write only to its own slot i.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Shortest representation that round-trips a double (%.17g), used for all
// numeric CSV output so reruns are byte-identical.
std::string format_double(double value);

// FNV-1a over a string; stable config fingerprint for output headers.
std::uint64_t fnv1a(const std::string& data);

} // namespace qtdi
