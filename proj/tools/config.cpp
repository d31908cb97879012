#include "config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qtdi_cli {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
    if (line > 0) throw CliError(7, "config line " + std::to_string(line) + ": " + message);
    throw CliError(7, "config: " + message); // flag-sourced value
}

double to_double(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) fail(line, "trailing characters in number '" + value + "'");
        return v;
    } catch (const CliError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + value + "'");
    }
}

std::int64_t to_int(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) fail(line, "trailing characters in integer '" + value + "'");
        return v;
    } catch (const CliError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected an integer, got '" + value + "'");
    }
}

std::uint64_t to_uint(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) fail(line, "trailing characters in integer '" + value + "'");
        return v;
    } catch (const CliError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected a non-negative integer, got '" + value + "'");
    }
}

std::vector<int> parse_occupation_list(const std::string& value, int line) {
    // either compact "1100" or comma separated "1,1,0,0"
    std::vector<int> occ;
    if (value.find(',') == std::string::npos && value.size() > 1) {
        for (char c : value) {
            if (c != '0' && c != '1') fail(line, "occupation string must contain only 0/1");
            occ.push_back(c - '0');
        }
    } else {
        for (const auto& tok : split(value, ',')) {
            const auto v = to_int(trim(tok), line);
            if (v != 0 && v != 1) fail(line, "occupations must be 0 or 1");
            occ.push_back(static_cast<int>(v));
        }
    }
    return occ;
}

struct MomentaSelection {
    bool all = true;
    std::vector<int> list;
};

MomentaSelection parse_momenta(const std::string& value, int line) {
    MomentaSelection sel;
    const std::string v = trim(value);
    if (v == "all") return sel;
    sel.all = false;
    for (const auto& tok : split(v, ','))
        sel.list.push_back(static_cast<int>(to_int(trim(tok), line)));
    if (sel.list.empty()) fail(line, "momenta list is empty");
    return sel;
}

} // namespace

RunConfig parse_config(const std::string& text, const FlagOverrides& overrides) {
    RunConfig cfg;
    MomentaSelection momenta;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string stripped = trim(raw);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') fail(line, "unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            static const std::set<std::string> known{"lattice", "hamiltonian", "state",
                                                     "times",   "scan",        "noise",
                                                     "output"};
            if (!known.count(section)) fail(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (section.empty()) fail(line, "key '" + key + "' outside any section");
        if (value.empty()) fail(line, "empty value for key '" + key + "'");

        if (section == "lattice") {
            if (key == "sites") cfg.sites = static_cast<int>(to_int(value, line));
            else if (key == "particles") cfg.particles = static_cast<int>(to_int(value, line));
            else if (key == "statistics") {
                if (value != "hardcore" && value != "fermion")
                    fail(line, "statistics must be 'hardcore' or 'fermion'");
                cfg.statistics = value;
            } else fail(line, "unknown key '" + key + "' in [lattice]");
        } else if (section == "hamiltonian") {
            if (key == "hopping") cfg.hopping = to_double(value, line);
            else if (key == "interaction") cfg.interaction = to_double(value, line);
            else if (key == "potentials") {
                cfg.potentials.clear();
                for (const auto& tok : split(value, ','))
                    cfg.potentials.push_back(to_double(trim(tok), line));
            } else fail(line, "unknown key '" + key + "' in [hamiltonian]");
        } else if (section == "state") {
            if (key == "kind") {
                if (value == "fock") cfg.state_kind = StateKind::fock;
                else if (value == "uniform") cfg.state_kind = StateKind::uniform;
                else if (value == "amplitudes") cfg.state_kind = StateKind::amplitudes;
                else fail(line, "state kind must be fock, uniform or amplitudes");
            } else if (key == "occupations") {
                cfg.occupations = parse_occupation_list(value, line);
            } else if (key == "configurations") {
                cfg.configurations.clear();
                for (const auto& tok : split(value, ';')) {
                    const std::string t = trim(tok);
                    if (t.empty()) continue;
                    cfg.configurations.push_back(parse_occupation_list(t, line));
                }
                if (cfg.configurations.empty()) fail(line, "empty configuration list");
            } else if (key == "amplitudes") {
                cfg.amplitudes.clear();
                for (const auto& tok : split(value, ';')) {
                    const std::string t = trim(tok);
                    if (t.empty()) continue;
                    const auto parts = split(t, ',');
                    if (parts.size() != 2)
                        fail(line, "amplitude entries must be 're,im' pairs");
                    cfg.amplitudes.emplace_back(to_double(trim(parts[0]), line),
                                                to_double(trim(parts[1]), line));
                }
                if (cfg.amplitudes.empty()) fail(line, "empty amplitude list");
            } else fail(line, "unknown key '" + key + "' in [state]");
        } else if (section == "times") {
            if (key == "t1") cfg.t1 = to_double(value, line);
            else if (key == "t2") cfg.t2 = to_double(value, line);
            else fail(line, "unknown key '" + key + "' in [times]");
        } else if (section == "scan") {
            if (key == "momenta") momenta = parse_momenta(value, line);
            else if (key == "phases") cfg.phases = static_cast<int>(to_int(value, line));
            else if (key == "reconstruct") {
                if (value != "true" && value != "false")
                    fail(line, "reconstruct must be true or false");
                cfg.reconstruct = value == "true";
            } else if (key == "records_dir") cfg.records_dir = value;
            else fail(line, "unknown key '" + key + "' in [scan]");
        } else if (section == "noise") {
            if (key == "shots") cfg.shots = to_uint(value, line);
            else if (key == "seed") cfg.seed = to_uint(value, line);
            else fail(line, "unknown key '" + key + "' in [noise]");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else fail(line, "unknown key '" + key + "' in [output]");
        }
    }

    // flags win over file values
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.shots) cfg.shots = *overrides.shots;
    if (overrides.phases) cfg.phases = *overrides.phases;
    if (overrides.threads) cfg.threads = *overrides.threads;
    if (overrides.momenta) momenta = parse_momenta(*overrides.momenta, -1);

    if (cfg.sites < 1) throw CliError(3, "config: lattice.sites must be at least 1");
    if (cfg.particles < 0 || cfg.particles > cfg.sites)
        throw CliError(1, "config: particle number exceeds lattice capacity");
    if (!cfg.potentials.empty() && static_cast<int>(cfg.potentials.size()) != cfg.sites)
        throw CliError(3, "config: potentials must list one value per site");
    if (cfg.phases < 3) throw CliError(6, "config: scan.phases must be at least 3");
    if (cfg.threads < 1) throw CliError(3, "config: threads must be at least 1");

    cfg.momenta_all = momenta.all;
    if (momenta.all) {
        cfg.momenta.resize(static_cast<std::size_t>(cfg.sites));
        for (int m = 0; m < cfg.sites; ++m) cfg.momenta[static_cast<std::size_t>(m)] = m;
    } else {
        for (int m : momenta.list)
            if (m < 0 || m >= cfg.sites)
                throw CliError(4, "config: momentum index " + std::to_string(m) +
                                      " off the lattice grid");
        cfg.momenta = momenta.list;
    }

    switch (cfg.state_kind) {
        case StateKind::fock:
            if (static_cast<int>(cfg.occupations.size()) != cfg.sites)
                throw CliError(3, "config: state.occupations must list one value per site");
            break;
        case StateKind::uniform:
            for (const auto& c : cfg.configurations)
                if (static_cast<int>(c.size()) != cfg.sites)
                    throw CliError(3, "config: each configuration must list one value per site");
            if (cfg.configurations.empty())
                throw CliError(3, "config: state.configurations is required for kind=uniform");
            break;
        case StateKind::amplitudes:
            if (cfg.amplitudes.empty())
                throw CliError(3, "config: state.amplitudes is required for kind=amplitudes");
            break;
    }
    return cfg;
}

std::string RunConfig::canonical() const {
    // Everything that determines output content, in fixed order; out_dir and
    // threads are deliberately excluded (thread count must not change bytes).
    std::ostringstream out;
    out << "lattice.sites=" << sites << "\n";
    out << "lattice.particles=" << particles << "\n";
    out << "lattice.statistics=" << statistics << "\n";
    out << "hamiltonian.hopping=" << format_double(hopping) << "\n";
    out << "hamiltonian.interaction=" << format_double(interaction) << "\n";
    out << "hamiltonian.potentials=";
    for (double v : potentials) out << format_double(v) << ",";
    out << "\n";
    out << "state.kind=" << static_cast<int>(state_kind) << "\n";
    out << "state.occupations=";
    for (int v : occupations) out << v;
    out << "\n";
    out << "state.configurations=";
    for (const auto& c : configurations) {
        for (int v : c) out << v;
        out << ";";
    }
    out << "\n";
    out << "state.amplitudes=";
    for (const auto& [re, im] : amplitudes)
        out << format_double(re) << "," << format_double(im) << ";";
    out << "\n";
    out << "times.t1=" << format_double(t1) << "\n";
    out << "times.t2=" << format_double(t2) << "\n";
    out << "scan.momenta=";
    for (int m : momenta) out << m << ",";
    out << "\n";
    out << "scan.phases=" << phases << "\n";
    out << "scan.reconstruct=" << (reconstruct ? 1 : 0) << "\n";
    out << "scan.records_dir=" << records_dir << "\n";
    out << "noise.shots=" << shots << "\n";
    out << "noise.seed=" << seed << "\n";
    return out.str();
}

} // namespace qtdi_cli
