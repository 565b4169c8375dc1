#include <cmath>
#include <vector>

#include "mpmimo/errors.hpp"
#include "mpmimo/linalg.hpp"
#include "mpmimo/netparams.hpp"
#include "mpmimo/rng.hpp"

namespace mpmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

NetworkParams synth_coupled_array(std::size_t n_ports, double coupling, double selectivity,
                                  const FrequencyGrid& grid, std::uint64_t seed) {
    if (n_ports < 1) throw Error("synthetic array needs at least one port");
    if (coupling < 0.0 || coupling >= 1.0) throw Error("coupling must lie in [0, 1)");
    if (selectivity < 0.0) throw Error("selectivity must be non-negative");

    // Per-entry randomness is drawn once, independent of the parameter
    // values, so the same seed gives smoothly comparable arrays when
    // sweeping coupling or selectivity.
    struct EntryShape {
        double phase, slope_u, ripple_rate, ripple_phase, amp_u;
    };
    Rng rng(seed);
    std::vector<EntryShape> shapes(n_ports * n_ports);
    for (std::size_t i = 0; i < n_ports; ++i)
        for (std::size_t j = i; j < n_ports; ++j)
            shapes[i * n_ports + j] = {2.0 * kPi * rng.uniform(), 0.5 + rng.uniform(),
                                       0.5 + 1.5 * rng.uniform(), 2.0 * kPi * rng.uniform(),
                                       rng.uniform()};

    const double amp_scale = 0.3 * std::min(selectivity, 1.0);
    const double span = grid.max() - grid.min();

    NetworkParams p;
    p.kind = ParamKind::Scattering;
    p.n_ports = n_ports;
    p.z_ref = 50.0;
    p.grid = grid;
    p.matrices.reserve(grid.size());

    for (double f : grid.points) {
        const double nu = span > 0.0 ? (f - grid.min()) / span : 0.0;
        CMat s(n_ports, n_ports);
        for (std::size_t i = 0; i < n_ports; ++i) {
            for (std::size_t j = i; j < n_ports; ++j) {
                const EntryShape& e = shapes[i * n_ports + j];
                const double mag = coupling * std::exp(-static_cast<double>(j - i));
                const double phase = e.phase + 2.0 * kPi * selectivity * e.slope_u * nu;
                const double ripple =
                    1.0 + amp_scale * e.amp_u * std::sin(2.0 * kPi * e.ripple_rate * nu + e.ripple_phase);
                const cd v = std::polar(mag * ripple, phase);
                s(i, j) = v;
                s(j, i) = v;  // reciprocal array
            }
        }
        // Passivity by spectral clipping; re-symmetrizing afterwards cannot
        // raise the spectral norm (triangle inequality), so 0.98 still holds.
        if (spectral_norm(s) > 0.98) {
            SvdResult r = svd(s);
            for (double& sv : r.s) sv = std::min(sv, 0.98);
            s = r.u * diag_matrix(r.s) * adjoint(r.v);
            s = 0.5 * (s + transpose(s));
        }
        p.matrices.push_back(std::move(s));
    }
    return p;
}

}  // namespace mpmimo
