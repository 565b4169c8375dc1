#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "mpmimo/errors.hpp"
#include "mpmimo/experiments.hpp"

namespace mpmimo {

namespace {

const std::set<std::string> kScenarios{
    "nmse-vs-power",  "nmse-vs-frequency", "nmse-vs-taps",       "snr-vs-frequency",
    "rate-vs-power",  "rate-vs-frequency", "power-vs-subcarrier"};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& path, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError(path, "expected a number, got '" + value + "'");
    return v;
}

std::size_t parse_count(const std::string& path, const std::string& value) {
    const double v = parse_number(path, value);
    if (v < 0.0 || v != std::floor(v))
        throw ConfigError(path, "expected a nonnegative integer, got '" + value + "'");
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& path, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number(path, item));
    }
    if (out.empty()) throw ConfigError(path, "expected a comma-separated list of numbers");
    return out;
}

// Linear-grid accumulator for the [sweep] section.
struct GridSpec {
    double start = 0.0, stop = 0.0;
    std::size_t points = 0;
    bool has_start = false, has_stop = false, has_points = false;
    std::vector<double> values;
};

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    GridSpec grid;
    std::string section;  // empty = top level

    std::stringstream stream(text);
    std::string raw;
    while (std::getline(stream, raw)) {
        // Strip comments ('#' or ';') and whitespace.
        const std::size_t cut = raw.find_first_of("#;");
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(line, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "array" && section != "chain" && section != "geometry" &&
                section != "sweep" && section != "ofdm")
                throw ConfigError("[" + section + "]", "unknown section");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string path = section.empty() ? key : "[" + section + "]." + key;
        if (key.empty()) throw ConfigError(path, "empty key");

        if (section.empty()) {
            if (key == "scenario") cfg.scenario = value;
            else if (key == "trials") cfg.trials = parse_count(path, value);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_count(path, value));
            else if (key == "pilots") cfg.pilots = parse_count(path, value);
            else if (key == "carrier") cfg.carrier = parse_number(path, value);
            else if (key == "power_dbm") cfg.power_dbm = parse_number(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "array") {
            if (key == "kind") {
                if (value == "synthetic") cfg.array.kind = ArrayKind::Synthetic;
                else if (value == "dipole") cfg.array.kind = ArrayKind::Dipole;
                else if (value == "touchstone") cfg.array.kind = ArrayKind::Touchstone;
                else throw ConfigError(path, "expected synthetic, dipole, or touchstone");
            } else if (key == "ports") cfg.array.ports = parse_count(path, value);
            else if (key == "coupling") cfg.array.coupling = parse_number(path, value);
            else if (key == "selectivity") cfg.array.selectivity = parse_number(path, value);
            else if (key == "f_lo") cfg.array.f_lo = parse_number(path, value);
            else if (key == "f_hi") cfg.array.f_hi = parse_number(path, value);
            else if (key == "path") cfg.array.path = value;
            else if (key == "spacing") cfg.array.spacing = parse_number(path, value);
            else if (key == "length") cfg.array.length = parse_number(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "chain") {
            if (key == "beta") cfg.chain.beta = parse_number(path, value);
            else if (key == "z_ref") cfg.chain.z_ref = parse_number(path, value);
            else if (key == "r_in") cfg.chain.r_in = parse_number(path, value);
            else if (key == "noise_figure") cfg.chain.noise_figure = parse_number(path, value);
            else if (key == "temperature") cfg.chain.temperature = parse_number(path, value);
            else if (key == "bandwidth") cfg.chain.bandwidth = parse_number(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "geometry") {
            if (key == "distance") cfg.geometry.distance = parse_number(path, value);
            else if (key == "d_ref") cfg.geometry.d_ref = parse_number(path, value);
            else if (key == "alpha") cfg.geometry.alpha = parse_number(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "sweep") {
            if (key == "values") grid.values = parse_list(path, value);
            else if (key == "start") {
                grid.start = parse_number(path, value);
                grid.has_start = true;
            } else if (key == "stop") {
                grid.stop = parse_number(path, value);
                grid.has_stop = true;
            } else if (key == "points") {
                grid.points = parse_count(path, value);
                grid.has_points = true;
            } else throw ConfigError(path, "unknown key");
        } else {  // ofdm
            if (key == "subcarriers") cfg.ofdm.subcarriers = parse_count(path, value);
            else if (key == "taps_assumed") cfg.ofdm.taps_assumed = parse_count(path, value);
            else if (key == "taps_true") cfg.ofdm.taps_true = parse_count(path, value);
            else if (key == "time_slots") cfg.ofdm.time_slots = parse_count(path, value);
            else if (key == "f_lo") cfg.ofdm.f_lo = parse_number(path, value);
            else if (key == "f_hi") cfg.ofdm.f_hi = parse_number(path, value);
            else throw ConfigError(path, "unknown key");
        }
    }

    // Assemble the axis grid.
    if (!grid.values.empty()) {
        if (grid.has_start || grid.has_stop || grid.has_points)
            throw ConfigError("[sweep]", "give either values or start/stop/points, not both");
        cfg.grid = grid.values;
    } else if (grid.has_start || grid.has_stop || grid.has_points) {
        if (!(grid.has_start && grid.has_stop && grid.has_points))
            throw ConfigError("[sweep]", "start, stop, and points must appear together");
        if (grid.points < 1) throw ConfigError("[sweep].points", "need at least one point");
        for (std::size_t i = 0; i < grid.points; ++i)
            cfg.grid.push_back(grid.points == 1 ? grid.start
                                                : grid.start + (grid.stop - grid.start) *
                                                                   static_cast<double>(i) /
                                                                   static_cast<double>(
                                                                       grid.points - 1));
    } else if (cfg.scenario == "power-vs-subcarrier") {
        // The axis is the subcarrier index; fill it from the block layout.
        for (std::size_t k = 0; k < cfg.ofdm.subcarriers; ++k)
            cfg.grid.push_back(static_cast<double>(k));
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
    if (kScenarios.find(scenario) == kScenarios.end())
        throw ConfigError("scenario",
                          scenario.empty() ? "missing scenario" : "unknown scenario '" + scenario + "'");
    if (trials < 1) throw ConfigError("trials", "need at least one trial");
    if (grid.empty()) throw ConfigError("[sweep]", "sweep grid is empty");
    for (const double v : grid)
        if (!std::isfinite(v)) throw ConfigError("[sweep]", "grid contains a non-finite value");
    if (pilots < 1) throw ConfigError("pilots", "need at least one pilot symbol");
    if (!(carrier > 0.0)) throw ConfigError("carrier", "carrier frequency must be positive");
    if (!std::isfinite(power_dbm)) throw ConfigError("power_dbm", "must be finite");

    if (array.ports < 1) throw ConfigError("[array].ports", "need at least one port");
    switch (array.kind) {
        case ArrayKind::Synthetic:
            if (array.coupling < 0.0 || array.coupling >= 1.0)
                throw ConfigError("[array].coupling", "must lie in [0, 1)");
            if (array.selectivity < 0.0)
                throw ConfigError("[array].selectivity", "must be nonnegative");
            if (!(array.f_lo > 0.0) || !(array.f_hi > array.f_lo))
                throw ConfigError("[array].f_lo", "need 0 < f_lo < f_hi");
            break;
        case ArrayKind::Dipole:
            if (array.ports != 2)
                throw ConfigError("[array].ports", "the dipole pair has exactly 2 ports");
            if (!(array.spacing > 0.0)) throw ConfigError("[array].spacing", "must be positive");
            if (!(array.length > 0.0)) throw ConfigError("[array].length", "must be positive");
            break;
        case ArrayKind::Touchstone:
            if (array.path.empty())
                throw ConfigError("[array].path", "touchstone source needs a file path");
            break;
    }

    try {
        chain.validate();
    } catch (const Error& e) {
        throw ConfigError("[chain]", e.what());
    }
    if (!(geometry.distance > 0.0)) throw ConfigError("[geometry].distance", "must be positive");
    if (!(geometry.d_ref > 0.0)) throw ConfigError("[geometry].d_ref", "must be positive");
    if (geometry.alpha < 0.0) throw ConfigError("[geometry].alpha", "must be nonnegative");

    const bool is_ofdm = scenario == "nmse-vs-taps" || scenario == "power-vs-subcarrier";
    if (is_ofdm) {
        if (ofdm.subcarriers < 1) throw ConfigError("[ofdm].subcarriers", "need at least one");
        if (ofdm.taps_true < 1 || ofdm.taps_true > ofdm.subcarriers)
            throw ConfigError("[ofdm].taps_true", "must lie in [1, subcarriers]");
        if (ofdm.taps_assumed < 1 || ofdm.taps_assumed > ofdm.subcarriers)
            throw ConfigError("[ofdm].taps_assumed", "must lie in [1, subcarriers]");
        if (ofdm.time_slots < 1) throw ConfigError("[ofdm].time_slots", "need at least one");
        if (!(ofdm.f_lo > 0.0) || !(ofdm.f_hi > ofdm.f_lo))
            throw ConfigError("[ofdm].f_lo", "need 0 < f_lo < f_hi");
        if (scenario == "nmse-vs-taps")
            for (const double v : grid)
                if (v != std::floor(v) || v < 1.0 ||
                    v > static_cast<double>(ofdm.subcarriers))
                    throw ConfigError("[sweep]",
                                      "tap axis entries must be integers in [1, subcarriers]");
    }

    // Frequency axes must stay inside the synthetic array's band; Touchstone
    // band membership is only known after loading the file.
    const bool freq_axis = scenario == "nmse-vs-frequency" || scenario == "snr-vs-frequency" ||
                           scenario == "rate-vs-frequency";
    if (freq_axis && array.kind == ArrayKind::Synthetic)
        for (const double f : grid)
            if (f < array.f_lo || f > array.f_hi)
                throw ConfigError("[sweep]", "frequency axis leaves the [array] band");
    if (!freq_axis && array.kind == ArrayKind::Synthetic &&
        (scenario == "nmse-vs-power" || scenario == "rate-vs-power"))
        if (carrier < array.f_lo || carrier > array.f_hi)
            throw ConfigError("carrier", "carrier lies outside the [array] band");
}

std::string config_hash(const ExperimentConfig& cfg) {
    // Canonical serialization in fixed field order, then 64-bit FNV-1a.
    char buf[64];
    std::string text = "scenario=" + cfg.scenario;
    const auto add = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, ";%s=%.12g", key, v);
        text += buf;
    };
    add("trials", static_cast<double>(cfg.trials));
    add("seed", static_cast<double>(cfg.seed));
    add("pilots", static_cast<double>(cfg.pilots));
    add("carrier", cfg.carrier);
    add("power_dbm", cfg.power_dbm);
    add("array.kind", static_cast<double>(cfg.array.kind));
    add("array.ports", static_cast<double>(cfg.array.ports));
    add("array.coupling", cfg.array.coupling);
    add("array.selectivity", cfg.array.selectivity);
    add("array.f_lo", cfg.array.f_lo);
    add("array.f_hi", cfg.array.f_hi);
    text += ";array.path=" + cfg.array.path;
    add("array.spacing", cfg.array.spacing);
    add("array.length", cfg.array.length);
    add("chain.beta", cfg.chain.beta);
    add("chain.z_ref", cfg.chain.z_ref);
    add("chain.r_in", cfg.chain.r_in);
    add("chain.noise_figure", cfg.chain.noise_figure);
    add("chain.temperature", cfg.chain.temperature);
    add("chain.bandwidth", cfg.chain.bandwidth);
    add("geometry.distance", cfg.geometry.distance);
    add("geometry.d_ref", cfg.geometry.d_ref);
    add("geometry.alpha", cfg.geometry.alpha);
    add("ofdm.subcarriers", static_cast<double>(cfg.ofdm.subcarriers));
    add("ofdm.taps_assumed", static_cast<double>(cfg.ofdm.taps_assumed));
    add("ofdm.taps_true", static_cast<double>(cfg.ofdm.taps_true));
    add("ofdm.time_slots", static_cast<double>(cfg.ofdm.time_slots));
    add("ofdm.f_lo", cfg.ofdm.f_lo);
    add("ofdm.f_hi", cfg.ofdm.f_hi);
    for (const double v : cfg.grid) add("grid", v);

    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mpmimo
