#pragma once

// Monte-Carlo sweep harness. A plain-text config describes one scenario
// (which curve to trace, over which axis, with which array and RF chain);
// run_sweep executes the trials with counter-derived per-trial seeds and
// returns one series per method, ready for CSV/JSON emission. Everything is
// deterministic for a fixed config: the same bytes come out regardless of
// thread count.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mpmimo/channel.hpp"

namespace mpmimo {

// Deterministic sub-seed tags used by run_sweep, exposed so a result can be
// reproduced piecewise: the pilot block is bpsk_pilots(n, cfg.pilots,
// derive_seed(cfg.seed, kPilotSeedTag)); sweep point i uses the base seed
// derive_seed(cfg.seed, kPointSeedBase + i), and trial t within a point
// derives from that base with counter t. Synthetic array shapes come from
// the two fixed seeds below so that the array is a fixture of the scenario
// rather than of the Monte-Carlo seed.
constexpr std::uint64_t kPilotSeedTag = 0x9A9A;
constexpr std::uint64_t kPointSeedBase = 1000;
constexpr std::uint64_t kSynthShapeSeedTx = 1001;
constexpr std::uint64_t kSynthShapeSeedRx = 1002;

enum class ArrayKind { Synthetic, Dipole, Touchstone };

// Where the coupled-array scattering data comes from. The synthetic array
// lives on [f_lo, f_hi]; the dipole pair is evaluated per frequency; a
// Touchstone file brings its own band.
struct ArraySource {
    ArrayKind kind = ArrayKind::Synthetic;
    std::size_t ports = 4;
    double coupling = 0.7;      // synthetic
    double selectivity = 0.5;   // synthetic
    double f_lo = 0.8e9;        // synthetic band edges
    double f_hi = 1.2e9;
    std::string path;           // touchstone
    double spacing = 0.05;      // dipole pair, meters
    double length = 0.15;       // dipole length, meters
};

// Extended-Friis link geometry.
struct Geometry {
    double distance = 100.0;  // meters
    double d_ref = 1.0;       // reference distance, meters
    double alpha = 2.0;       // pathloss exponent
};

// Multicarrier block layout for the OFDM scenarios.
struct OfdmBlock {
    std::size_t subcarriers = 8;
    std::size_t taps_assumed = 2;
    std::size_t taps_true = 2;
    std::size_t time_slots = 4;
    double f_lo = 1.0e9;  // band edges, Hz
    double f_hi = 1.008e9;
};

struct ExperimentConfig {
    std::string scenario;  // one of the run_sweep dispatch names
    ArraySource array;
    RfChain chain;
    Geometry geometry;
    std::vector<double> grid;  // sweep axis values
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t pilots = 8;     // single-carrier pilot symbols
    double carrier = 1.0e9;     // fixed carrier for power axes, Hz
    double power_dbm = 0.0;     // fixed transmit power for frequency axes
    OfdmBlock ofdm;

    // Field-path-tagged sanity check; throws ConfigError.
    void validate() const;
};

// One series per method over a common axis.
struct SweepResult {
    std::string axis_name;
    std::vector<double> axis;
    std::vector<std::string> methods;
    std::vector<std::vector<double>> series;  // series[m] aligned with axis
    std::string unit;
    std::string config_hash;
    std::size_t trials = 0;
};

// -- config ingestion (src/config.cpp) --

// Key = value lines with [section] headers and '#'/';' comments. Unknown
// sections or keys are ConfigErrors naming the offending path.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// FNV-1a over the canonical serialization; 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// watts = 10^((dBm - 30)/10)
double dbm_to_watts(double dbm);

// -- measurement primitives --

// E{||sqrt(rho) H_eff x||^2} / E{||n||^2} with i.i.d. BPSK pilots and fresh
// channel/noise draws per trial; deterministic for a fixed seed.
double empirical_snr(const LinkModel& model, std::size_t trials, std::uint64_t seed);

// Sum ||x - x_hat||^2 / sum ||x||^2 over paired realizations.
double nmse(const std::vector<CMat>& estimates, const std::vector<CMat>& truths);

// tr(E) / tr(R): the closed-form counterpart of the empirical ratio.
double theoretical_nmse(const CMat& e, const CMat& r);

// -- sweeps --

// Dispatches on cfg.scenario: nmse-vs-power, nmse-vs-frequency,
// nmse-vs-taps, snr-vs-frequency, rate-vs-power, rate-vs-frequency,
// power-vs-subcarrier. Trials run in parallel over `threads` workers with
// per-trial derived seeds; the reduction is ordered by trial index, so the
// result is identical for any thread count.
SweepResult run_sweep(const ExperimentConfig& cfg, std::size_t threads = 1);

// CSV ("axis,<method...>,unit" header, %.12g floats) or JSON mirroring the
// SweepResult fields with floats rounded to 12 significant digits. Throws
// ConfigError for empty series or an unknown format, IoError on write
// failure.
void emit(const SweepResult& result, const std::string& path, const std::string& format);

}  // namespace mpmimo
