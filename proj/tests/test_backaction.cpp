#include <doctest.h>

#include "fixture.hpp"
#include "qtdi/backaction.hpp"

using namespace qtdi;

TEST_CASE("single shot is a deterministic 0/1 trajectory") {
    const auto inst = fixture::make();
    const ProtocolResult a =
        run_projective_protocol(inst.basis, inst.psi, inst.spectral, fixture::kT1, fixture::kT2,
                                1, 99);
    const ProtocolResult b =
        run_projective_protocol(inst.basis, inst.psi, inst.spectral, fixture::kT1, fixture::kT2,
                                1, 99);
    CHECK(a.correlator == b.correlator);
    int ones = 0;
    for (Eigen::Index j = 0; j < a.joint_probabilities.rows(); ++j)
        for (Eigen::Index l = 0; l < a.joint_probabilities.cols(); ++l) {
            const double p = a.joint_probabilities(j, l);
            CHECK((p == 0.0 || p == 1.0));
            if (p == 1.0) ++ones;
        }
    CHECK(ones == 1);
}

TEST_CASE("joint probabilities are a distribution and the first marginal matches |c_j|^2") {
    const auto inst = fixture::make();
    const std::uint64_t shots = 200000;
    const ProtocolResult result = run_projective_protocol(inst.basis, inst.psi, inst.spectral,
                                                          fixture::kT1, fixture::kT2, shots, 4);
    CHECK(result.joint_probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.joint_probabilities.minCoeff() >= 0.0);

    const VectorC c = inst.spectral->propagator(fixture::kT1).matrix * inst.psi.amplitudes;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        const double p = std::norm(c[j]);
        const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(shots));
        CHECK(std::abs(result.first_marginal[j] - p) < 5.0 * se + 1e-9);
    }
}

TEST_CASE("Fock state at t1 = 0: estimator converges to G itself") {
    // Gamma = 0 here, so the consecutive-measurement channel is unbiased
    LatticeSpec lattice{4, 2, Statistics::hardcore_boson};
    auto basis = FockBasis::build(lattice);
    HamiltonianSpec hspec;
    hspec.hopping = 1.0;
    hspec.interaction = 2.0;
    auto spectral = Spectral::decompose(build_hamiltonian(basis, hspec));
    const StateVector psi = fock_state(basis, {1, 0, 1, 0});
    const double t2 = 0.9;

    const ProtocolResult mc =
        run_projective_protocol(basis, psi, spectral, 0.0, t2, 100000, 12);
    const Propagator u1 = spectral->propagator(0.0);
    const Propagator u2 = spectral->propagator(t2);
    const VectorC g = dcf_all(basis, psi, u1, u2);
    for (int d = 0; d < 4; ++d) {
        CHECK(std::abs(g[d].imag()) < 1e-12);
        CHECK(std::abs(mc.correlator[d] - g[d].real()) < 4.0 * mc.standard_error[d] + 1e-9);
    }
}

TEST_CASE("superposition fixture: estimator tracks the projective part, not G") {
    const auto inst = fixture::make();
    const std::uint64_t shots = 1000000;
    const ProtocolResult mc = run_projective_protocol(inst.basis, inst.psi, inst.spectral,
                                                      fixture::kT1, fixture::kT2, shots, 12345);
    bool some_total_mismatch = false;
    for (int d = 0; d < 4; ++d) {
        const double gate = 4.0 * mc.standard_error[d];
        CHECK(std::abs(mc.correlator[d] - fixture::kExpectedGproj[d]) < gate);
        if (std::abs(mc.correlator[d] - fixture::kExpectedG[d].real()) > gate)
            some_total_mismatch = true;
    }
    CHECK(some_total_mismatch);
}

TEST_CASE("parallel shot batches reproduce the serial run exactly") {
    const auto inst = fixture::make();
    const ProtocolResult serial = run_projective_protocol(
        inst.basis, inst.psi, inst.spectral, fixture::kT1, fixture::kT2, 300000, 8, 1);
    const ProtocolResult parallel = run_projective_protocol(
        inst.basis, inst.psi, inst.spectral, fixture::kT1, fixture::kT2, 300000, 8, 4);
    CHECK(serial.correlator == parallel.correlator);
    CHECK(serial.standard_error == parallel.standard_error);
    CHECK(serial.joint_probabilities == parallel.joint_probabilities);
}

TEST_CASE("comparison report") {
    const auto inst = fixture::make();
    const ComparisonReport report = compare_protocols(inst.basis, inst.psi, inst.spectral,
                                                      fixture::kT1, fixture::kT2, 200000, 77);

    SUBCASE("exact columns carry the frozen values") {
        for (int d = 0; d < 4; ++d) {
            CHECK(std::abs(report.rows[d].exact_total - fixture::kExpectedG[d]) < 1e-12);
            CHECK(std::abs(report.rows[d].exact_projective - fixture::kExpectedGproj[d]) < 1e-12);
        }
    }

    SUBCASE("QTDI channel is unbiased, Monte Carlo channel is not") {
        CHECK(report.max_qtdi_error < 1e-8);
        for (int d = 0; d < 4; ++d) CHECK(report.rows[d].mc_matches_projective);
        bool biased = false;
        for (int d = 0; d < 4; ++d) biased |= !report.rows[d].mc_matches_total;
        CHECK(biased);
    }

    SUBCASE("report serializations are reproducible") {
        const ComparisonReport again = compare_protocols(inst.basis, inst.psi, inst.spectral,
                                                         fixture::kT1, fixture::kT2, 200000, 77);
        CHECK(report_to_json(report, "1.0.0", 1) == report_to_json(again, "1.0.0", 1));
        CHECK(report_table(report) == report_table(again));
        CHECK(report_table(report).find("projective only") != std::string::npos);
        const std::string json = report_to_json(report, "1.0.0", 0xABCDULL);
        CHECK(json.find("\"mc_matches_projective\": true") != std::string::npos);
        CHECK(json.find("000000000000abcd") != std::string::npos);
    }
}

TEST_CASE("error scaling across shot decades") {
    const auto inst = fixture::make();
    double previous = 1e9;
    for (std::uint64_t shots : {1000ULL, 10000ULL, 100000ULL}) {
        double rms = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const ProtocolResult mc = run_projective_protocol(
                inst.basis, inst.psi, inst.spectral, fixture::kT1, fixture::kT2, shots, 500 + seed);
            for (int d = 0; d < 4; ++d) {
                const double e = mc.correlator[d] - fixture::kExpectedGproj[d];
                rms += e * e;
            }
        }
        rms = std::sqrt(rms / 20.0);
        CHECK(rms < previous);
        previous = rms;
    }
}
