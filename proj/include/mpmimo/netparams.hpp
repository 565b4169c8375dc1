#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpmimo/mat.hpp"

namespace mpmimo {

// Strictly increasing positive frequencies in Hz.
struct FrequencyGrid {
    std::vector<double> points;

    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> pts);

    double min() const { return points.front(); }
    double max() const { return points.back(); }
    std::size_t size() const { return points.size(); }
};

enum class ParamKind { Scattering, Impedance };

// Frequency-dependent n-port network description: one matrix per grid point.
struct NetworkParams {
    ParamKind kind = ParamKind::Scattering;
    std::size_t n_ports = 0;
    double z_ref = 50.0;
    FrequencyGrid grid;
    std::vector<CMat> matrices;
};

struct PassivityReport {
    std::vector<double> max_singular;  // per grid point
    double worst_frequency = 0.0;
    bool passive = false;
};

// Touchstone v1 subset. Option line '# <unit> <S|Z> <RI|MA|DB> R <z_ref>',
// '!' comments, 1- and 2-port data on one line per frequency (2-port in
// S11 S21 S12 S22 column order), n >= 3 with one matrix row per line.
// Y/G/H parameters and v2 files are rejected as UnsupportedFormat.
NetworkParams parse_touchstone(const std::string& text);
NetworkParams parse_touchstone_file(const std::string& path);

// Canonical form: Hz, RI, '%.12g' numbers. parse(write(parse(x))) == parse(x).
std::string write_touchstone(const NetworkParams& params);
void write_touchstone_file(const NetworkParams& params, const std::string& path);

// S = (Z - z_ref I)(Z + z_ref I)^-1 and the inverse map Z = z_ref (I + S)(I - S)^-1.
// Throws SingularConversion when the matrix to invert has 2-norm condition > 1e12.
CMat z_to_s(const CMat& z, double z_ref);
CMat s_to_z(const CMat& s, double z_ref);

// Entrywise linear interpolation between bracketing grid points.
// Throws OutOfBand outside [grid.min, grid.max].
CMat interpolate(const NetworkParams& params, double f_hz);

// Largest singular value per frequency; passive iff all <= 1 + 1e-9.
// Throws WrongKind on impedance input.
PassivityReport check_passivity(const NetworkParams& params);

// 2x2 impedance matrix of two thin parallel side-by-side dipoles, by
// adaptive quadrature of the induced-EMF integral with the usual sinusoidal
// current profile. Diagonal entries evaluate the same integral at the wire
// radius (default length/2000). Relative quadrature tolerance 1e-8.
CMat dipole_pair_impedance(double f_hz, double spacing_m, double length_m,
                           double wire_radius_m = 0.0);

// Deterministic synthetic passive coupled array. Entry magnitudes follow
// coupling * exp(-|i-j|); 'selectivity' scales phase slope and ripple across
// the band. Passivity enforced by clipping singular values to <= 0.98, then
// re-symmetrizing (which cannot raise the spectral norm).
NetworkParams synth_coupled_array(std::size_t n_ports, double coupling, double selectivity,
                                  const FrequencyGrid& grid, std::uint64_t seed);

}  // namespace mpmimo
