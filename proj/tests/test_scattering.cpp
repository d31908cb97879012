#include <doctest.h>

#include <numbers>

#include "fixture.hpp"
#include "qtdi/scattering.hpp"

using namespace qtdi;

namespace {

double quadrature_norm(Envelope shape, double width) {
    // Simpson on [-40w, 40w]; the envelopes decay well inside that
    const double a = -40.0 * width, b = 40.0 * width;
    const int n = 40000;
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + h * i;
        const double f = envelope_value(shape, width, x);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * f * f;
    }
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("envelopes are L2 normalized") {
    for (double width : {0.5, 1.0, 2.5}) {
        CHECK(quadrature_norm(Envelope::gaussian, width) == doctest::Approx(1.0).epsilon(1e-10));
        // rectangular: flat value over support 2w, zero outside; exact product
        const double level = envelope_value(Envelope::rectangular, width, 0.5 * width);
        CHECK(level * level * 2.0 * width == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(envelope_value(Envelope::rectangular, width, 1.01 * width) == 0.0);
    }
}

TEST_CASE("wavepacket pair validation and overlap flag") {
    WavepacketPair pair;
    pair.t_alpha = 1.0;
    pair.t_beta = 0.5;
    CHECK_THROWS_AS(pair.validate(), Error);

    pair.t_alpha = 0.0;
    pair.t_beta = 0.5;
    pair.width = 1.0;
    CHECK(!pair.non_overlapping());
    pair.t_beta = 6.5;
    CHECK(pair.non_overlapping());
}

TEST_CASE("raw mode with separated packets loses the interference term") {
    WavepacketPair pair;
    pair.shape = Envelope::rectangular;
    pair.width = 0.5;
    pair.t_alpha = 0.0;
    pair.t_beta = 4.0;
    DetectorConfig config;
    config.mode = OverlapMode::raw;
    const IsfInputs inputs{{2.0, 0.0}, {3.0, 0.0}, {0.9, 0.4}};

    // detection offset on the beta packet: alpha envelope is exactly zero
    const double x = -pair.t_beta;
    const double f_beta = envelope_value(pair.shape, pair.width, x + pair.t_beta);
    CHECK(intensity(inputs, pair, config, x) ==
          doctest::Approx(f_beta * f_beta * 3.0).epsilon(1e-12));
}

TEST_CASE("overlapped mode with vanishing cross ISF is phase independent") {
    WavepacketPair pair;
    pair.t_alpha = 0.0;
    pair.t_beta = 1.0;
    DetectorConfig config;
    const IsfInputs inputs{{2.0, 0.0}, {3.0, 0.0}, {0.0, 0.0}};
    const double f = envelope_value(pair.shape, pair.width, 0.2);
    double reference = intensity(inputs, pair, config, 0.2);
    CHECK(reference == doctest::Approx(f * f * 5.0).epsilon(1e-12));
    for (double phi : {0.3, 1.1, 2.9}) {
        pair.phi_beta = phi;
        CHECK(intensity(inputs, pair, config, 0.2) == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("two-site instance matches the hand-expanded intensity formula") {
    const FockBasis basis = FockBasis::build({2, 1, Statistics::hardcore_boson});
    const auto spectral = Spectral::decompose(build_hamiltonian(basis, {1.0, 0.0, {}}));
    const StateVector psi = fock_state(basis, {1, 0});
    const double ta = 0.2, tb = 0.9;
    const Propagator ua = spectral->propagator(ta);
    const Propagator ub = spectral->propagator(tb);
    const int m = 1; // p = pi
    const Complex s_aa = isf(basis, psi, ua, ua, m);
    const Complex s_bb = isf(basis, psi, ub, ub, m);
    const Complex s_ab = isf(basis, psi, ua, ub, m);

    WavepacketPair pair;
    pair.t_alpha = ta;
    pair.t_beta = tb;
    pair.phi_alpha = 0.4;
    pair.phi_beta = 1.3;
    DetectorConfig config;
    config.momentum_index = m;
    const double x = 0.1;
    const double f = envelope_value(pair.shape, pair.width, x);
    const double expected =
        f * f * (s_aa.real() + s_bb.real() +
                 2.0 * (std::exp(Complex(0.0, pair.phi_beta - pair.phi_alpha)) * s_ab).real());
    CHECK(intensity({s_aa, s_bb, s_ab}, pair, config, x) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("genuinely negative intensity input is rejected") {
    WavepacketPair pair;
    pair.t_alpha = 0.0;
    pair.t_beta = 1.0;
    DetectorConfig config;
    const IsfInputs inconsistent{{-1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(intensity(inconsistent, pair, config, 0.0), Error);
}

TEST_CASE("intensity depends only on the phase difference") {
    const IsfInputs inputs{{2.0, 0.0}, {2.5, 0.0}, {0.7, -0.5}};
    WavepacketPair pair;
    pair.t_alpha = 0.0;
    pair.t_beta = 1.0;
    DetectorConfig config;
    for (double phi : uniform_phase_grid(8)) {
        WavepacketPair fwd = pair, swapped = pair;
        fwd.phi_alpha = 0.0;
        fwd.phi_beta = phi;
        swapped.phi_alpha = phi;
        swapped.phi_beta = 0.0;
        WavepacketPair neg = pair;
        neg.phi_alpha = 0.0;
        neg.phi_beta = -phi;
        CHECK(intensity(inputs, swapped, config, 0.0) ==
              doctest::Approx(intensity(inputs, neg, config, 0.0)).epsilon(1e-12));
        (void)fwd;
    }
}

namespace {

struct FixtureScan {
    fixture::Instance inst = fixture::make();
    WavepacketPair pair;
    DetectorConfig config;
    FixtureScan(int momentum_index) {
        pair.t_alpha = fixture::kT1;
        pair.t_beta = fixture::kT2;
        config.momentum_index = momentum_index;
    }
    InterferogramRecord run(int n_phases, std::optional<NoiseSpec> noise, int threads = 1) const {
        return interferogram(inst.basis, inst.psi, inst.spectral, pair, config,
                             uniform_phase_grid(n_phases), noise, threads);
    }
};

} // namespace

TEST_CASE("noiseless interferogram structure") {
    FixtureScan scan(0); // S(0) = N^2 is real and positive
    const InterferogramRecord record = scan.run(16, std::nullopt);

    SUBCASE("minimum sits at phi = pi for real positive S") {
        std::size_t argmin = 0;
        for (std::size_t i = 0; i < record.points.size(); ++i)
            if (record.points[i].intensity < record.points[argmin].intensity) argmin = i;
        CHECK(record.points[argmin].phi == doctest::Approx(std::numbers::pi));
    }

    SUBCASE("uniform-grid mean equals the diagonal ISF terms") {
        double mean = 0.0;
        for (const auto& pt : record.points) mean += pt.intensity;
        mean /= static_cast<double>(record.points.size());
        const double diag = fixture::kExpectedS[0].real() * 2.0; // S_aa(0) = S_bb(0) = N^2
        CHECK(std::abs(mean - diag) < 1e-10);
    }

    SUBCASE("peak-to-peak amplitude is 4|S|") {
        double lo = record.points[0].intensity, hi = lo;
        for (const auto& pt : record.points) {
            lo = std::min(lo, pt.intensity);
            hi = std::max(hi, pt.intensity);
        }
        CHECK(std::abs((hi - lo) - 4.0 * std::abs(fixture::kExpectedS[0])) < 1e-10);
    }
}

TEST_CASE("interferogram needs at least 3 phases") {
    FixtureScan scan(1);
    CHECK_THROWS_AS(scan.run(2, std::nullopt), Error);
    CHECK_THROWS_AS(uniform_phase_grid(2), Error);
}

TEST_CASE("seeded noise is reproducible and thread-count independent") {
    FixtureScan scan(1);
    const NoiseSpec noise{10000, 42};
    const InterferogramRecord a = scan.run(16, noise, 1);
    const InterferogramRecord b = scan.run(16, noise, 1);
    const InterferogramRecord c = scan.run(16, noise, 4);
    REQUIRE(a.points.size() == 16);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].intensity == b.points[i].intensity);
        CHECK(a.points[i].intensity == c.points[i].intensity);
        CHECK(a.points[i].sigma == c.points[i].sigma);
    }
}

TEST_CASE("frozen noisy record (seed 42, M = 10^4)") {
    // golden values from the first run verified against the noiseless oracle
    FixtureScan scan(1);
    const InterferogramRecord record = scan.run(16, NoiseSpec{10000, 42});
    const std::array<double, 16> expected{
        3.8604, 4.0806, 4.0728, 3.9709, 3.6842, 3.3276, 2.8914, 2.4696,
        2.1498, 1.9540, 1.9236, 2.0735, 2.3196, 2.7244, 3.1390, 3.5456,
    };
    REQUIRE(record.points.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(record.points[i].intensity == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("noisy records converge to the noiseless curve") {
    FixtureScan scan(2);
    const InterferogramRecord exact = scan.run(16, std::nullopt);
    double previous = 1e9;
    for (std::uint64_t shots : {100ULL, 10000ULL, 1000000ULL}) {
        const InterferogramRecord noisy = scan.run(16, NoiseSpec{shots, 7});
        double rms = 0.0;
        for (std::size_t i = 0; i < noisy.points.size(); ++i) {
            const double r = noisy.points[i].intensity - exact.points[i].intensity;
            rms += r * r;
        }
        rms = std::sqrt(rms / 16.0);
        CHECK(rms < previous);
        CHECK(rms < 6.0 / std::sqrt(static_cast<double>(shots))); // ~ sqrt(I)/sqrt(M) scale
        previous = rms;
    }
}

TEST_CASE("record CSV round trip") {
    FixtureScan scan(3);
    const InterferogramRecord record = scan.run(12, NoiseSpec{5000, 9});
    const std::string csv = record_to_csv(record, {"# header line"});
    const InterferogramRecord parsed = record_from_csv(csv);
    CHECK(parsed.momentum_index == record.momentum_index);
    CHECK(parsed.t_alpha == record.t_alpha);
    CHECK(parsed.t_beta == record.t_beta);
    CHECK(parsed.shots == record.shots);
    CHECK(parsed.seed == record.seed);
    REQUIRE(parsed.points.size() == record.points.size());
    for (std::size_t i = 0; i < record.points.size(); ++i) {
        CHECK(parsed.points[i].phi == record.points[i].phi);           // %.17g round-trips
        CHECK(parsed.points[i].intensity == record.points[i].intensity);
        CHECK(parsed.points[i].sigma == record.points[i].sigma);
    }

    CHECK_THROWS_AS(record_from_csv("no header\n1,2,3\n"), Error);
    CHECK_THROWS_AS(record_from_csv("phi,intensity,sigma\n0,1\n"), Error);
}

TEST_CASE("record validation rejects bad phase grids") {
    InterferogramRecord record;
    record.points = {{0.0, 1.0, 0.0}, {0.5, 1.0, 0.0}, {0.4, 1.0, 0.0}}; // not increasing
    CHECK_THROWS_AS(record.validate(), Error);
    record.points = {{0.0, 1.0, 0.0}, {0.5, 1.0, 0.0}, {7.0, 1.0, 0.0}}; // outside [0, 2pi)
    CHECK_THROWS_AS(record.validate(), Error);
    record.points = {{0.0, 1.0, 0.0}, {0.5, 1.0, 0.0}};
    CHECK_THROWS_AS(record.validate(), Error);
}
