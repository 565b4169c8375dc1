#include <algorithm>
#include <cmath>

#include "mpmimo/errors.hpp"
#include "mpmimo/linalg.hpp"
#include "mpmimo/netparams.hpp"

namespace mpmimo {

namespace {

// Inverse through the SVD already needed for the conditioning guard.
CMat checked_inverse(const CMat& m, const char* what) {
    const SvdResult r = svd(m);
    const double smax = r.s.empty() ? 0.0 : r.s.front();
    const double smin = r.s.empty() ? 0.0 : r.s.back();
    if (smin <= 0.0 || smax / smin > 1e12)
        throw SingularConversion(std::string(what) + " is singular or near-singular");
    std::vector<double> inv(r.s.size());
    for (std::size_t i = 0; i < r.s.size(); ++i) inv[i] = 1.0 / r.s[i];
    return r.v * diag_matrix(inv) * adjoint(r.u);
}

}  // namespace

CMat z_to_s(const CMat& z, double z_ref) {
    if (!z.square()) throw DimensionMismatch("impedance matrix must be square");
    if (!(z_ref > 0.0)) throw Error("reference impedance must be positive");
    const CMat zr = z_ref * CMat::identity(z.rows());
    return (z - zr) * checked_inverse(z + zr, "Z + z_ref*I");
}

CMat s_to_z(const CMat& s, double z_ref) {
    if (!s.square()) throw DimensionMismatch("scattering matrix must be square");
    if (!(z_ref > 0.0)) throw Error("reference impedance must be positive");
    const CMat i = CMat::identity(s.rows());
    return z_ref * ((i + s) * checked_inverse(i - s, "I - S"));
}

CMat interpolate(const NetworkParams& params, double f_hz) {
    const auto& pts = params.grid.points;
    if (f_hz < pts.front() || f_hz > pts.back())
        throw OutOfBand("frequency outside the tabulated grid");
    const auto it = std::lower_bound(pts.begin(), pts.end(), f_hz);
    const std::size_t hi = static_cast<std::size_t>(it - pts.begin());
    if (hi < pts.size() && pts[hi] == f_hz) return params.matrices[hi];
    const std::size_t lo = hi - 1;
    const double w = (f_hz - pts[lo]) / (pts[hi] - pts[lo]);
    return (1.0 - w) * params.matrices[lo] + w * params.matrices[hi];
}

PassivityReport check_passivity(const NetworkParams& params) {
    if (params.kind != ParamKind::Scattering)
        throw WrongKind("passivity check needs scattering parameters");
    PassivityReport rep;
    rep.max_singular.reserve(params.matrices.size());
    double worst = -1.0;
    for (std::size_t i = 0; i < params.matrices.size(); ++i) {
        const double s = spectral_norm(params.matrices[i]);
        rep.max_singular.push_back(s);
        if (s > worst) {
            worst = s;
            rep.worst_frequency = params.grid.points[i];
        }
    }
    rep.passive = worst <= 1.0 + 1e-9;
    return rep;
}

}  // namespace mpmimo
