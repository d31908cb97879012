#include "qtdi/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qtdi/util.hpp"

namespace qtdi {

CosineFit fit_cosine(const std::vector<double>& phases, const std::vector<double>& intensities,
                     const std::vector<double>& sigmas) {
    const std::size_t n = phases.size();
    if (intensities.size() != n || sigmas.size() != n)
        throw Error(ErrorCode::config, "phase/intensity/sigma lists must have equal length");
    if (n < 3)
        throw Error(ErrorCode::identifiability, "cosine fit needs at least 3 phases");

    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd data(n), weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(phases[i]);
        design(i, 2) = std::sin(phases[i]);
        data[i] = intensities[i];
        weight[i] = sigmas[i] > 0.0 ? 1.0 / (sigmas[i] * sigmas[i]) : 1.0;
    }

    const Eigen::MatrixXd normal = design.transpose() * weight.asDiagonal() * design;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    lu.setThreshold(1e-12);
    if (lu.rank() < 3)
        throw Error(ErrorCode::identifiability,
                    "cosine fit is not identifiable from the given phases");
    const Eigen::MatrixXd cov = lu.inverse();
    const Eigen::Vector3d coef = cov * (design.transpose() * weight.cwiseProduct(data).eval());

    CosineFit fit;
    fit.offset = coef[0];
    const double c = coef[1], s = coef[2];
    // A + c cos + s sin == A + B cos(phi + phi0) with c = B cos phi0, s = -B sin phi0
    fit.amplitude = std::hypot(c, s);
    fit.phase = std::atan2(-s, c);
    if (fit.phase <= -std::numbers::pi) fit.phase = std::numbers::pi;
    if (fit.amplitude < 1e-14 * std::max(1.0, std::abs(fit.offset))) {
        // numerically constant record: canonical zero phase
        fit.amplitude = 0.0;
        fit.phase = 0.0;
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double model = coef[0] + c * design(i, 1) + s * design(i, 2);
        ss += (model - data[i]) * (model - data[i]);
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(n));

    fit.sigma_offset = std::sqrt(cov(0, 0));
    fit.var_c = cov(1, 1);
    fit.var_s = cov(2, 2);
    fit.cov_cs = cov(1, 2);
    if (fit.amplitude > 0.0) {
        const double b2 = fit.amplitude * fit.amplitude;
        // delta method through B = hypot(c, s), phi0 = atan2(-s, c)
        fit.sigma_amplitude =
            std::sqrt(std::max(0.0, (c * c * fit.var_c + s * s * fit.var_s + 2.0 * c * s * fit.cov_cs) / b2));
        fit.sigma_phase =
            std::sqrt(std::max(0.0, (s * s * fit.var_c + c * c * fit.var_s - 2.0 * c * s * fit.cov_cs))) / b2;
    } else {
        fit.sigma_amplitude = std::sqrt(std::max(fit.var_c, fit.var_s));
        fit.sigma_phase = std::numbers::pi; // phase undefined at zero amplitude
    }
    return fit;
}

CosineFit fit_cosine(const InterferogramRecord& record) {
    record.validate();
    std::vector<double> phases, intensities, sigmas;
    phases.reserve(record.points.size());
    for (const auto& pt : record.points) {
        phases.push_back(pt.phi);
        intensities.push_back(pt.intensity);
        sigmas.push_back(pt.sigma);
    }
    return fit_cosine(phases, intensities, sigmas);
}

RecoveredISF recover_isf_scan(const FockBasis& basis, const StateVector& psi,
                              const std::shared_ptr<const Spectral>& spectral,
                              const WavepacketPair& pair, const std::vector<double>& phase_grid,
                              const std::vector<int>& momentum_indices,
                              const std::optional<NoiseSpec>& noise, int threads) {
    pair.validate();
    const int L = basis.sites();
    for (int m : momentum_indices)
        if (m < 0 || m >= L) throw Error(ErrorCode::grid, "momentum index off the lattice grid");

    // the three ISF inputs per momentum come from one pass over the grid
    const Propagator ua = spectral->propagator(pair.t_alpha);
    const Propagator ub = spectral->propagator(pair.t_beta);
    const VectorC s_aa = isf_all(basis, psi, ua, ua);
    const VectorC s_bb = isf_all(basis, psi, ub, ub);
    const VectorC s_ab = isf_all(basis, psi, ua, ub);

    RecoveredISF scan;
    scan.sites = L;
    scan.momentum_indices = momentum_indices;
    scan.points.resize(momentum_indices.size());
    scan.t_alpha = pair.t_alpha;
    scan.t_beta = pair.t_beta;
    scan.shots = noise ? noise->shots : 0;
    scan.seed = noise ? noise->seed : 0;

    parallel_for(momentum_indices.size(), threads, [&](std::size_t k) {
        const int m = momentum_indices[k];
        std::optional<NoiseSpec> local;
        if (noise && noise->shots > 0)
            local = NoiseSpec{noise->shots, derive_stream(noise->seed, static_cast<std::uint64_t>(m))};
        const IsfInputs inputs{s_aa[m], s_bb[m], s_ab[m]};
        const InterferogramRecord record =
            interferogram_from_isf(inputs, m, L, pair, phase_grid, local, 1);
        const CosineFit fit = fit_cosine(record);

        RecoveredPoint& pt = scan.points[k];
        pt.value = 0.5 * fit.amplitude * std::exp(Complex(0.0, fit.phase));
        pt.sigma_abs = 0.5 * fit.sigma_amplitude;
        pt.sigma_arg = fit.sigma_phase;
        // S = (c - i s)/2 in quadrature coefficients
        pt.var_re = 0.25 * fit.var_c;
        pt.var_im = 0.25 * fit.var_s;
        pt.cov_re_im = -0.25 * fit.cov_cs;
    });
    return scan;
}

ImGammaEstimate recover_im_gamma(const RecoveredISF& scan) {
    const int L = scan.sites;
    std::vector<int> seen(L, 0);
    for (int m : scan.momentum_indices)
        if (m >= 0 && m < L) ++seen[m];
    if (static_cast<int>(scan.momentum_indices.size()) != L ||
        std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
        throw Error(ErrorCode::grid, "incomplete momentum grid");

    VectorC isf_grid(L);
    std::vector<const RecoveredPoint*> by_index(L, nullptr);
    for (std::size_t k = 0; k < scan.momentum_indices.size(); ++k) {
        isf_grid[scan.momentum_indices[k]] = scan.points[k].value;
        by_index[scan.momentum_indices[k]] = &scan.points[k];
    }

    ImGammaEstimate est;
    est.value = reconstruct_im_gamma(isf_grid);

    // Im Gamma(d) = (1/L) sum_q [cos(p_q d) Im S(q) - sin(p_q d) Re S(q)];
    // independent fits per momentum, so variances add through the coefficients.
    const auto grid = momentum_grid(L);
    est.sigma = Vector::Zero(L);
    for (int d = 0; d < L; ++d) {
        double var = 0.0;
        for (int q = 0; q < L; ++q) {
            const double cs = std::cos(grid[q] * d);
            const double sn = std::sin(grid[q] * d);
            const RecoveredPoint& pt = *by_index[q];
            var += cs * cs * pt.var_im + sn * sn * pt.var_re - 2.0 * cs * sn * pt.cov_re_im;
        }
        est.sigma[d] = std::sqrt(std::max(0.0, var)) / static_cast<double>(L);
    }
    return est;
}

std::string scan_to_csv(const RecoveredISF& scan, const std::vector<std::string>& extra_header) {
    std::ostringstream out;
    for (const auto& line : extra_header) out << line << "\n";
    out << "# t_alpha=" << format_double(scan.t_alpha) << "\n";
    out << "# t_beta=" << format_double(scan.t_beta) << "\n";
    out << "# shots=" << scan.shots << "\n";
    out << "# seed=" << scan.seed << "\n";
    out << "# convention=" << scan.convention << "\n";
    out << "p,re_S,im_S,sigma_abs,sigma_arg\n";
    const auto grid = momentum_grid(scan.sites);
    for (std::size_t k = 0; k < scan.points.size(); ++k) {
        const auto& pt = scan.points[k];
        out << format_double(grid[scan.momentum_indices[k]]) << ","
            << format_double(pt.value.real()) << "," << format_double(pt.value.imag()) << ","
            << format_double(pt.sigma_abs) << "," << format_double(pt.sigma_arg) << "\n";
    }
    return out.str();
}

std::string scan_sidecar_json(const RecoveredISF& scan, const std::string& tool_version,
                              std::uint64_t config_hash) {
    nlohmann::json j;
    j["version"] = tool_version;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash));
    j["config_hash"] = hash;
    j["t_alpha"] = scan.t_alpha;
    j["t_beta"] = scan.t_beta;
    j["shots"] = scan.shots;
    j["seed"] = scan.seed;
    j["convention"] = scan.convention;
    j["sites"] = scan.sites;
    j["momentum_indices"] = scan.momentum_indices;
    return j.dump(2) + "\n";
}

} // namespace qtdi
