#include "qtdi/scattering.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qtdi/util.hpp"

namespace qtdi {

namespace {

constexpr double kNegativeTol = 1e-10;

double clamp_intensity(double value) {
    if (value >= 0.0) return value;
    if (value >= -kNegativeTol) return 0.0;
    throw Error(ErrorCode::numeric,
                "negative intensity beyond tolerance; ISF inputs are inconsistent");
}

} // namespace

double envelope_value(Envelope shape, double width, double x) {
    if (width <= 0.0) throw Error(ErrorCode::config, "envelope width must be positive");
    switch (shape) {
        case Envelope::gaussian:
            return std::pow(2.0 * std::numbers::pi * width * width, -0.25) *
                   std::exp(-x * x / (4.0 * width * width));
        case Envelope::rectangular:
            return (std::abs(x) <= width) ? 1.0 / std::sqrt(2.0 * width) : 0.0;
    }
    throw Error(ErrorCode::config, "unknown envelope shape");
}

void WavepacketPair::validate() const {
    if (width <= 0.0) throw Error(ErrorCode::config, "envelope width must be positive");
    if (!(t_alpha < t_beta))
        throw Error(ErrorCode::config, "wavepacket arrival times must satisfy t_alpha < t_beta");
}

bool WavepacketPair::non_overlapping() const { return std::abs(t_beta - t_alpha) > 6.0 * width; }

double intensity(const IsfInputs& isf, const WavepacketPair& pair, const DetectorConfig& config,
                 double detection_offset) {
    pair.validate();
    double f_alpha, f_beta;
    if (config.mode == OverlapMode::overlapped) {
        // overlap stage: both scattered envelopes become the same factor
        f_alpha = f_beta = envelope_value(pair.shape, pair.width, detection_offset);
    } else {
        // raw: each envelope sits at its own retarded offset x + t
        f_alpha = envelope_value(pair.shape, pair.width, detection_offset + pair.t_alpha);
        f_beta = envelope_value(pair.shape, pair.width, detection_offset + pair.t_beta);
    }
    const Complex cross = std::exp(Complex(0.0, pair.phi_beta - pair.phi_alpha)) * isf.s_alpha_beta;
    const double value = f_alpha * f_alpha * isf.s_alpha_alpha.real() +
                         f_beta * f_beta * isf.s_beta_beta.real() +
                         2.0 * f_alpha * f_beta * cross.real();
    return clamp_intensity(value);
}

void InterferogramRecord::validate() const {
    if (points.size() < 3)
        throw Error(ErrorCode::identifiability, "interferogram needs at least 3 phases");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double phi = points[i].phi;
        if (phi < 0.0 || phi >= 2.0 * std::numbers::pi)
            throw Error(ErrorCode::config, "interferogram phases must lie in [0, 2pi)");
        if (i > 0 && phi <= points[i - 1].phi)
            throw Error(ErrorCode::config, "interferogram phases must be strictly increasing");
        if (points[i].intensity < 0.0 || points[i].sigma < 0.0)
            throw Error(ErrorCode::config, "interferogram intensities and sigmas must be >= 0");
    }
}

std::vector<double> uniform_phase_grid(int n_phases) {
    if (n_phases < 3)
        throw Error(ErrorCode::identifiability, "interferogram needs at least 3 phases");
    std::vector<double> grid(n_phases);
    for (int k = 0; k < n_phases; ++k)
        grid[k] = 2.0 * std::numbers::pi * k / n_phases;
    return grid;
}

InterferogramRecord interferogram_from_isf(const IsfInputs& isf, int momentum_index, int sites,
                                           const WavepacketPair& pair,
                                           const std::vector<double>& phase_grid,
                                           const std::optional<NoiseSpec>& noise, int threads) {
    pair.validate();
    if (momentum_index < 0 || momentum_index >= sites)
        throw Error(ErrorCode::grid, "momentum index off the lattice grid");
    if (phase_grid.size() < 3)
        throw Error(ErrorCode::identifiability, "interferogram needs at least 3 phases");

    const double diag = isf.s_alpha_alpha.real() + isf.s_beta_beta.real();
    const double amp = 2.0 * std::abs(isf.s_alpha_beta);
    const double arg = std::arg(isf.s_alpha_beta);

    InterferogramRecord record;
    record.momentum_index = momentum_index;
    record.momentum = momentum_grid(sites)[static_cast<std::size_t>(momentum_index)];
    record.t_alpha = pair.t_alpha;
    record.t_beta = pair.t_beta;
    record.shots = noise ? noise->shots : 0;
    record.seed = noise ? noise->seed : 0;
    record.points.resize(phase_grid.size());

    parallel_for(phase_grid.size(), threads, [&](std::size_t i) {
        const double phi = phase_grid[i];
        const double exact = clamp_intensity(diag + amp * std::cos(phi + arg));
        InterferogramPoint& pt = record.points[i];
        pt.phi = phi;
        if (!noise || noise->shots == 0) {
            pt.intensity = exact;
            pt.sigma = 0.0;
        } else {
            const double m = static_cast<double>(noise->shots);
            auto eng = make_engine(noise->seed, i);
            pt.intensity = static_cast<double>(poisson_draw(eng, m * exact)) / m;
            // one-count Poisson floor keeps exact-zero points at finite weight
            pt.sigma = std::sqrt(std::max(exact, 1.0 / m) / m);
        }
    });
    record.validate();
    return record;
}

InterferogramRecord interferogram(const FockBasis& basis, const StateVector& psi,
                                  const std::shared_ptr<const Spectral>& spectral,
                                  const WavepacketPair& pair, const DetectorConfig& config,
                                  const std::vector<double>& phase_grid,
                                  const std::optional<NoiseSpec>& noise, int threads) {
    if (config.mode != OverlapMode::overlapped)
        throw Error(ErrorCode::config, "interferogram requires overlapped detection");
    const int m = config.momentum_index;
    if (m < 0 || m >= basis.sites())
        throw Error(ErrorCode::grid, "momentum index off the lattice grid");
    const Propagator ua = spectral->propagator(pair.t_alpha);
    const Propagator ub = spectral->propagator(pair.t_beta);
    IsfInputs isf_values{isf_all(basis, psi, ua, ua)[m], isf_all(basis, psi, ub, ub)[m],
                         isf_all(basis, psi, ua, ub)[m]};
    return interferogram_from_isf(isf_values, m, basis.sites(), pair, phase_grid, noise, threads);
}

std::string record_to_csv(const InterferogramRecord& record,
                          const std::vector<std::string>& extra_header) {
    std::ostringstream out;
    for (const auto& line : extra_header) out << line << "\n";
    out << "# p_index=" << record.momentum_index << "\n";
    out << "# p=" << format_double(record.momentum) << "\n";
    out << "# t_alpha=" << format_double(record.t_alpha) << "\n";
    out << "# t_beta=" << format_double(record.t_beta) << "\n";
    out << "# shots=" << record.shots << "\n";
    out << "# seed=" << record.seed << "\n";
    out << "phi,intensity,sigma\n";
    for (const auto& pt : record.points)
        out << format_double(pt.phi) << "," << format_double(pt.intensity) << ","
            << format_double(pt.sigma) << "\n";
    return out.str();
}

InterferogramRecord record_from_csv(const std::string& text) {
    InterferogramRecord record;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            const std::string value = line.substr(eq + 1);
            try {
                if (key == "p_index") record.momentum_index = std::stoi(value);
                else if (key == "p") record.momentum = std::stod(value);
                else if (key == "t_alpha") record.t_alpha = std::stod(value);
                else if (key == "t_beta") record.t_beta = std::stod(value);
                else if (key == "shots") record.shots = std::stoull(value);
                else if (key == "seed") record.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw Error(ErrorCode::parse, "line " + std::to_string(lineno) +
                                                  ": bad metadata value for '" + key + "'");
            }
            continue;
        }
        if (!header_seen) {
            if (line != "phi,intensity,sigma")
                throw Error(ErrorCode::parse, "line " + std::to_string(lineno) +
                                                  ": expected header 'phi,intensity,sigma'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        InterferogramPoint pt;
        double* slots[3] = {&pt.phi, &pt.intensity, &pt.sigma};
        for (int f = 0; f < 3; ++f) {
            if (!std::getline(row, field, ','))
                throw Error(ErrorCode::parse,
                            "line " + std::to_string(lineno) + ": expected 3 comma-separated fields");
            try {
                *slots[f] = std::stod(field);
            } catch (const std::exception&) {
                throw Error(ErrorCode::parse,
                            "line " + std::to_string(lineno) + ": bad number '" + field + "'");
            }
        }
        record.points.push_back(pt);
    }
    if (!header_seen)
        throw Error(ErrorCode::parse, "no 'phi,intensity,sigma' header found");
    record.validate();
    return record;
}

} // namespace qtdi
