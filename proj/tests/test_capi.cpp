#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "qtdi.h"

namespace {

struct System {
    qtdi_system* ptr;
    explicit System(qtdi_system* p) : ptr(p) {}
    ~System() { qtdi_system_destroy(ptr); }
};

struct State {
    qtdi_state* ptr;
    explicit State(qtdi_state* p) : ptr(p) {}
    ~State() { qtdi_state_destroy(ptr); }
};

System fixture_system() {
    return System(qtdi_system_create(4, 2, QTDI_HARDCORE_BOSON, fixture::kHopping,
                                     fixture::kInteraction, fixture::kPotentials.data()));
}

State fixture_state(const System& sys) {
    const int configs[8] = {1, 1, 0, 0, 0, 1, 1, 0};
    return State(qtdi_state_uniform(sys.ptr, configs, 2));
}

} // namespace

TEST_CASE("system creation and capacity errors") {
    System sys = fixture_system();
    REQUIRE(sys.ptr != nullptr);
    CHECK(qtdi_system_sites(sys.ptr) == 4);
    CHECK(qtdi_system_particles(sys.ptr) == 2);
    CHECK(qtdi_system_dimension(sys.ptr) == 6);

    CHECK(qtdi_system_create(3, 4, QTDI_HARDCORE_BOSON, 1.0, 0.0, nullptr) == nullptr);
    CHECK(std::string(qtdi_error_message()).find("capacity") != std::string::npos);

    double p = 0.0;
    CHECK(qtdi_system_momentum(sys.ptr, 1, &p) == QTDI_OK);
    CHECK(p == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(qtdi_system_momentum(sys.ptr, 4, &p) == QTDI_ERR_GRID);
}

TEST_CASE("state constructors") {
    System sys = fixture_system();
    const int occ[4] = {1, 0, 1, 0};
    State fock(qtdi_state_fock(sys.ptr, occ));
    CHECK(fock.ptr != nullptr);

    const int bad[4] = {1, 1, 1, 0};
    CHECK(qtdi_state_fock(sys.ptr, bad) == nullptr);

    std::vector<double> re(6, 0.0), im(6, 0.0);
    re[0] = 2.0; // off-norm on purpose
    int renorm = 0;
    State amp(qtdi_state_amplitudes(sys.ptr, re.data(), im.data(), &renorm));
    CHECK(amp.ptr != nullptr);
    CHECK(renorm == 1);
}

TEST_CASE("correlation values match the frozen fixture") {
    System sys = fixture_system();
    State st = fixture_state(sys);
    REQUIRE(st.ptr != nullptr);

    for (int m = 0; m < 4; ++m) {
        double re = 0.0, im = 0.0;
        CHECK(qtdi_isf(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, m, &re, &im) == QTDI_OK);
        CHECK(std::abs(std::complex<double>(re, im) - fixture::kExpectedS[m]) < 1e-12);
    }
    for (int d = 0; d < 4; ++d) {
        double out[6];
        CHECK(qtdi_split_dcf(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, d, out) == QTDI_OK);
        CHECK(std::abs(std::complex<double>(out[0], out[1]) - fixture::kExpectedG[d]) < 1e-12);
        CHECK(std::abs(out[2] - fixture::kExpectedGproj[d]) < 1e-12);
        CHECK(std::abs(out[0] - (out[2] + out[4])) < 1e-10);

        double re = 0.0, im = 0.0;
        CHECK(qtdi_dcf(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, d, &re, &im) == QTDI_OK);
        CHECK(std::abs(std::complex<double>(re, im) - fixture::kExpectedG[d]) < 1e-10);
    }

    double split6[6];
    CHECK(qtdi_isf_split(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, 0, split6) == QTDI_OK);
    CHECK(std::abs(split6[2] + split6[4] - 4.0) < 1e-10); // S_proj + S_coh = N^2 at p = 0
    CHECK(qtdi_isf_split(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, 7, split6) ==
          QTDI_ERR_GRID);

    double q_isf = 0.0, q_dcf = 0.0, cl = 0.0;
    CHECK(qtdi_symmetry_check(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, &q_isf, &q_dcf, &cl) ==
          QTDI_OK);
    CHECK(q_isf < 1e-10);
    CHECK(q_dcf < 1e-10);
    CHECK(cl > 1e-3);

    double isf_re[4], isf_im[4], gamma[4];
    for (int m = 0; m < 4; ++m) {
        CHECK(qtdi_isf(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, m, &isf_re[m], &isf_im[m]) ==
              QTDI_OK);
    }
    CHECK(qtdi_reconstruct_im_gamma(4, isf_re, isf_im, gamma) == QTDI_OK);
    for (int d = 0; d < 4; ++d) {
        double out[6];
        qtdi_split_dcf(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, d, out);
        CHECK(std::abs(gamma[d] - out[5]) < 1e-10);
    }
}

TEST_CASE("interferogram, record CSV and fit through the C surface") {
    System sys = fixture_system();
    State st = fixture_state(sys);

    std::vector<double> phases(16);
    for (int k = 0; k < 16; ++k) phases[k] = 2.0 * std::numbers::pi * k / 16.0;
    std::vector<double> intensity(16), sigma(16);
    CHECK(qtdi_interferogram(sys.ptr, st.ptr, 2, fixture::kT1, fixture::kT2, phases.data(), 16, 0,
                             0, 1, intensity.data(), sigma.data()) == QTDI_OK);

    double fit[10];
    CHECK(qtdi_fit_cosine(phases.data(), intensity.data(), sigma.data(), 16, fit) == QTDI_OK);
    CHECK(std::abs(0.5 * fit[1] - std::abs(fixture::kExpectedS[2])) < 1e-8);
    CHECK(std::abs(fit[2] - std::arg(fixture::kExpectedS[2])) < 1e-8);

    char* csv = qtdi_record_to_csv(2, 4, fixture::kT1, fixture::kT2, 0, 0, phases.data(),
                                   intensity.data(), sigma.data(), 16, nullptr, 0);
    REQUIRE(csv != nullptr);
    int n = 0;
    CHECK(qtdi_record_from_csv(csv, &n, nullptr, nullptr, nullptr, nullptr) == QTDI_OK);
    CHECK(n == 16);
    std::vector<double> phi2(16), int2(16), sig2(16);
    double meta[5];
    CHECK(qtdi_record_from_csv(csv, &n, phi2.data(), int2.data(), sig2.data(), meta) == QTDI_OK);
    CHECK(meta[0] == 2.0);
    CHECK(int2 == intensity);
    qtdi_string_free(csv);

    CHECK(qtdi_record_from_csv("garbage", &n, nullptr, nullptr, nullptr, nullptr) ==
          QTDI_ERR_PARSE);
}

TEST_CASE("scan and Im Gamma recovery through the C surface") {
    System sys = fixture_system();
    State st = fixture_state(sys);
    const int momenta[4] = {0, 1, 2, 3};
    double re[4], im[4], sig_abs[4], sig_arg[4], var_re[4], var_im[4], cov[4];
    CHECK(qtdi_recover_scan(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, momenta, 4, 16, 0, 0, 1,
                            re, im, sig_abs, sig_arg, var_re, var_im, cov) == QTDI_OK);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(std::complex<double>(re[m], im[m]) - fixture::kExpectedS[m]) < 1e-8);

    double value[4], sigma[4];
    CHECK(qtdi_recover_im_gamma(4, momenta, 4, re, im, var_re, var_im, cov, value, sigma) ==
          QTDI_OK);
    for (int d = 0; d < 4; ++d) {
        double out[6];
        qtdi_split_dcf(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, d, out);
        CHECK(std::abs(value[d] - out[5]) < 1e-8);
    }

    const int partial[2] = {0, 1};
    CHECK(qtdi_recover_im_gamma(4, partial, 2, re, im, nullptr, nullptr, nullptr, value, sigma) ==
          QTDI_ERR_GRID);
}

TEST_CASE("backaction handle surface") {
    System sys = fixture_system();
    State st = fixture_state(sys);
    qtdi_backaction* report =
        qtdi_backaction_run(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, 100000, 7, 16, 1);
    REQUIRE(report != nullptr);
    CHECK(qtdi_backaction_rows(report) == 4);
    for (int d = 0; d < 4; ++d) {
        double out[10];
        int flags[2];
        CHECK(qtdi_backaction_row(report, d, out, flags) == QTDI_OK);
        CHECK(std::abs(out[2] - fixture::kExpectedGproj[d]) < 1e-12);
        CHECK(flags[0] == 1); // C_hat consistent with the projective part
        CHECK(out[9] < 1e-8); // QTDI round trip error
    }
    char* json = qtdi_backaction_json(report, "1.0.0", 42);
    REQUIRE(json != nullptr);
    CHECK(std::string(json).find("\"rows\"") != std::string::npos);
    qtdi_string_free(json);
    char* table = qtdi_backaction_table(report);
    REQUIRE(table != nullptr);
    CHECK(std::string(table).find("verdict") != std::string::npos);
    qtdi_string_free(table);
    qtdi_backaction_destroy(report);
}

TEST_CASE("intensity and protocol surfaces") {
    const double isf6[6] = {2.0, 0.0, 3.0, 0.0, 0.5, -0.2};
    double value = 0.0;
    CHECK(qtdi_intensity(isf6, 0, 1.0, 0.0, 1.0, 0.0, 0.7, 1, 0.0, &value) == QTDI_OK);
    CHECK(value > 0.0);

    System sys = fixture_system();
    State st = fixture_state(sys);
    double corr[4], se[4];
    CHECK(qtdi_projective_protocol(sys.ptr, st.ptr, fixture::kT1, fixture::kT2, 50000, 3, 1, corr,
                                   se, nullptr) == QTDI_OK);
    for (int d = 0; d < 4; ++d)
        CHECK(std::abs(corr[d] - fixture::kExpectedGproj[d]) < 5.0 * se[d] + 1e-9);

    CHECK(qtdi_dcf(nullptr, st.ptr, 0.0, 1.0, 0, &value, &value) == QTDI_ERR_INVALID);
    CHECK(qtdi_version() == std::string("1.0.0"));
    CHECK(qtdi_derive_stream(1, 2) == qtdi_derive_stream(1, 2));
    CHECK(qtdi_derive_stream(1, 2) != qtdi_derive_stream(1, 3));
}
