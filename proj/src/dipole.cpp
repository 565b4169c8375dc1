#include <cmath>
#include <complex>
#include <functional>

#include "mpmimo/errors.hpp"
#include "mpmimo/netparams.hpp"

namespace mpmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kC0 = 299792458.0;            // m/s
constexpr double kEta0 = 376.730313668;        // ohms, free-space wave impedance

using cfun = std::function<cd(double)>;

cd simpson(double a, double b, cd fa, cd fm, cd fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

cd adapt(const cfun& f, double a, double b, cd fa, cd fm, cd fb, cd whole, double tol, int depth) {
    if (depth > 40) throw NumericalFailure("dipole quadrature failed to converge");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const cd flm = f(lm);
    const cd frm = f(rm);
    const cd left = simpson(a, m, fa, flm, fm);
    const cd right = simpson(m, b, fm, frm, fb);
    const cd delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

cd integrate(const cfun& f, double a, double b, double rel_tol) {
    const cd fa = f(a);
    const cd fb = f(b);
    const cd fm = f(0.5 * (a + b));
    const cd whole = simpson(a, b, fa, fm, fb);
    const double tol = rel_tol * std::max(std::abs(whole), 1e-3);
    return adapt(f, a, b, fa, fm, fb, whole, tol, 0);
}

// Induced-EMF coupling integral for two parallel side-by-side thin dipoles
// carrying the sinusoidal current sin(k(l/2 - |z|)), horizontal separation d.
// The self term is the same expression evaluated at d = wire radius.
cd emf_impedance(double k, double l, double d, double rel_tol) {
    const double h = 0.5 * l;
    const double skl = std::sin(k * h);
    const double ckl = std::cos(k * h);
    const cd j(0.0, 1.0);

    auto kern = [&](double z) -> cd {
        const double r0 = std::sqrt(d * d + z * z);
        const double r1 = std::sqrt(d * d + (z - h) * (z - h));
        const double r2 = std::sqrt(d * d + (z + h) * (z + h));
        const cd e0 = std::exp(-j * (k * r0)) / r0;
        const cd e1 = std::exp(-j * (k * r1)) / r1;
        const cd e2 = std::exp(-j * (k * r2)) / r2;
        return std::sin(k * (h - std::abs(z))) * (e1 + e2 - 2.0 * ckl * e0);
    };

    // split at z = 0 where |z| kinks
    const cd integral = integrate(kern, -h, 0.0, rel_tol) + integrate(kern, 0.0, h, rel_tol);
    return j * kEta0 / (4.0 * kPi * skl * skl) * integral;
}

}  // namespace

CMat dipole_pair_impedance(double f_hz, double spacing_m, double length_m, double wire_radius_m) {
    if (!(f_hz > 0.0)) throw Error("frequency must be positive");
    if (!(spacing_m > 0.0)) throw Error("dipole spacing must be positive");
    if (!(length_m > 0.0)) throw Error("dipole length must be positive");
    // Thin-wire default. At length/2000 the half-wave reactance lands within
    // 0.1 ohm of the sine/cosine-integral closed form; thicker wires pull it
    // visibly below the textbook 42.5 ohms.
    const double a = wire_radius_m > 0.0 ? wire_radius_m : length_m / 2000.0;

    const double k = 2.0 * kPi * f_hz / kC0;
    const cd z_self = emf_impedance(k, length_m, a, 1e-8);
    const cd z_mut = emf_impedance(k, length_m, spacing_m, 1e-8);

    CMat z(2, 2);
    z(0, 0) = z_self;
    z(1, 1) = z_self;
    z(0, 1) = z_mut;
    z(1, 0) = z_mut;  // reciprocity: identical by construction
    return z;
}

}  // namespace mpmimo
