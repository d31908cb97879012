#include <doctest.h>

#include <random>

#include "qtdi/hilbert.hpp"

using namespace qtdi;

namespace {

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

} // namespace

TEST_CASE("basis enumeration pins the (L=2, N=1) ordering") {
    const FockBasis basis = FockBasis::build({2, 1, Statistics::hardcore_boson});
    REQUIRE(basis.dimension() == 2);
    CHECK(basis.occupation_vector(0) == std::vector<int>{1, 0});
    CHECK(basis.occupation_vector(1) == std::vector<int>{0, 1});
}

TEST_CASE("basis dimension equals binomial(L, N)") {
    CHECK(FockBasis::build({4, 2, Statistics::hardcore_boson}).dimension() == 6);
    for (int L = 1; L <= 7; ++L)
        for (int N = 0; N <= L; ++N)
            CHECK(FockBasis::build({L, N, Statistics::hardcore_boson}).dimension() ==
                  static_cast<std::size_t>(binomial(L, N)));
}

TEST_CASE("over-capacity lattice is rejected") {
    CHECK_THROWS_AS(FockBasis::build({3, 4, Statistics::hardcore_boson}), Error);
    try {
        FockBasis::build({3, 4, Statistics::hardcore_boson});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::capacity);
    }
}

TEST_CASE("index map round-trips for every basis state") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int L = 2 + static_cast<int>(rng() % 6);
        const int N = static_cast<int>(rng() % (L + 1));
        const FockBasis basis = FockBasis::build({L, N, Statistics::hardcore_boson});
        for (std::size_t i = 0; i < basis.dimension(); ++i)
            CHECK(basis.index_of(basis.mask(i)) == i);
    }
}

TEST_CASE("density operators read off occupations and sum to N identity") {
    const FockBasis two_site = FockBasis::build({2, 1, Statistics::hardcore_boson});
    CHECK(density_operator(two_site, 0).diagonal == Vector{{1.0, 0.0}});
    CHECK(density_operator(two_site, 1).diagonal == Vector{{0.0, 1.0}});

    const FockBasis basis = FockBasis::build({5, 3, Statistics::hardcore_boson});
    Vector total = Vector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    for (int s = 0; s < basis.sites(); ++s) {
        const DensityOperator op = density_operator(basis, s);
        for (Eigen::Index i = 0; i < op.diagonal.size(); ++i)
            CHECK((op.diagonal[i] == 0.0 || op.diagonal[i] == 1.0));
        total += op.diagonal;
    }
    for (Eigen::Index i = 0; i < total.size(); ++i)
        CHECK(total[i] == 3.0); // exact integer arithmetic on diagonals
}

TEST_CASE("site index is validated") {
    const FockBasis basis = FockBasis::build({3, 1, Statistics::hardcore_boson});
    CHECK_THROWS_AS(density_operator(basis, 3), Error);
    CHECK_THROWS_AS(density_operator(basis, -1), Error);
}

TEST_CASE("density operators at different sites commute exactly") {
    const FockBasis basis = FockBasis::build({4, 2, Statistics::hardcore_boson});
    const MatrixC a = density_operator(basis, 1).matrix();
    const MatrixC b = density_operator(basis, 3).matrix();
    CHECK((a * b - b * a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state constructors produce unit norm") {
    const FockBasis basis = FockBasis::build({4, 2, Statistics::hardcore_boson});
    CHECK(fock_state(basis, {1, 1, 0, 0}).norm() == doctest::Approx(1.0).epsilon(1e-12));

    const StateVector uniform = uniform_superposition(
        basis, {occupation_mask({1, 1, 0, 0}), occupation_mask({0, 1, 1, 0})});
    CHECK(uniform.norm() == doctest::Approx(1.0).epsilon(1e-12));

    VectorC amps = VectorC::Zero(6);
    amps[0] = Complex(3.0, 0.0);
    amps[2] = Complex(0.0, 4.0);
    bool renormalized = false;
    const StateVector scaled = state_from_amplitudes(basis, amps, &renormalized);
    CHECK(renormalized);
    CHECK(scaled.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(scaled.amplitudes[0] - Complex(0.6, 0.0)) < 1e-12);
}

TEST_CASE("occupation inputs are validated") {
    const FockBasis basis = FockBasis::build({4, 2, Statistics::hardcore_boson});
    CHECK_THROWS_AS(fock_state(basis, {1, 1, 1, 0}), Error);       // wrong particle count
    CHECK_THROWS_AS(fock_state(basis, {1, 1, 0}), Error);          // wrong length
    CHECK_THROWS_AS(fock_state(basis, {2, 0, 0, 0}), Error);       // not 0/1
    CHECK_THROWS_AS(uniform_superposition(basis, {}), Error);      // empty
    CHECK_THROWS_AS(uniform_superposition(basis, {occupation_mask({1, 1, 0, 0}),
                                                  occupation_mask({1, 1, 0, 0})}),
                    Error); // duplicate
}
