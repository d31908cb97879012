#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qtdi {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using VectorC = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using MatrixC = Eigen::MatrixXcd;

// Error kinds mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    capacity = 1,        // particle number exceeds lattice capacity
    index = 2,           // site/displacement/basis index out of range
    config = 3,          // mismatched basis/spec/propagator combination
    grid = 4,            // momentum not on the lattice grid, or grid incomplete
    numeric = 5,         // non-Hermitian input, negative intensity, ...
    identifiability = 6, // cosine fit not identifiable from the phases given
    parse = 7,           // malformed config or record file
    io = 8,              // filesystem failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace qtdi
