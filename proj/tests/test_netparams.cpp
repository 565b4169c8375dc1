#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mpmimo/errors.hpp"
#include "mpmimo/linalg.hpp"
#include "mpmimo/netparams.hpp"

using namespace mpmimo;
using testutil::max_diff;
using testutil::random_mat;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEta0 = 376.730313668;
constexpr double kGamma = 0.57721566490153286;  // Euler-Mascheroni

// Sine/cosine integrals by power series (plenty accurate for x <= ~22,
// which covers every argument used below).
double si(double x) {
    long double term = x, sum = x;
    for (int k = 1; k < 200; ++k) {
        // t_{k} = (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
        term *= -static_cast<long double>(x) * x / (2 * k * (2 * k + 1));
        const long double add = term / (2 * k + 1);
        sum += add;
        if (std::abs(static_cast<double>(add)) < 1e-18 * std::abs(static_cast<double>(sum)) + 1e-300)
            break;
    }
    return static_cast<double>(sum);
}

double ci(double x) {
    long double term = 1.0L, sum = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= -static_cast<long double>(x) * x / ((2 * k - 1) * (2 * k));
        const long double add = term / (2 * k);
        sum += add;
        if (std::abs(static_cast<double>(add)) < 1e-18 * std::abs(static_cast<double>(sum)) + 1e-300)
            break;
    }
    return kGamma + std::log(x) + static_cast<double>(sum);
}

// Closed-form induced-EMF mutual impedance of two side-by-side half-wave
// dipoles (spacing d, length l = lambda/2), max-current reference.
cd mutual_halfwave_oracle(double d, double lambda) {
    const double k = 2.0 * kPi / lambda;
    const double l = 0.5 * lambda;
    const double u0 = k * d;
    const double u1 = k * (std::sqrt(d * d + l * l) + l);
    const double u2 = k * (std::sqrt(d * d + l * l) - l);
    const double r = kEta0 / (4.0 * kPi) * (2.0 * ci(u0) - ci(u1) - ci(u2));
    const double x = -kEta0 / (4.0 * kPi) * (2.0 * si(u0) - si(u1) - si(u2));
    return {r, x};
}

// Closed-form thin-dipole self impedance (length l, radius a), input-current
// reference (max-current form divided by sin^2(kl/2)).
cd self_oracle(double l, double a, double lambda) {
    const double k = 2.0 * kPi / lambda;
    const double kl = k * l;
    const double r_m =
        kEta0 / (2.0 * kPi) *
        (kGamma + std::log(kl) - ci(kl) + 0.5 * std::sin(kl) * (si(2 * kl) - 2.0 * si(kl)) +
         0.5 * std::cos(kl) * (kGamma + std::log(0.5 * kl) + ci(2 * kl) - 2.0 * ci(kl)));
    const double x_m =
        kEta0 / (4.0 * kPi) *
        (2.0 * si(kl) + std::cos(kl) * (2.0 * si(kl) - si(2 * kl)) -
         std::sin(kl) * (2.0 * ci(kl) - ci(2 * kl) - ci(2.0 * k * a * a / l)));
    const double s2 = std::sin(0.5 * kl) * std::sin(0.5 * kl);
    return cd(r_m, x_m) / s2;
}

NetworkParams two_point_params(const CMat& a, const CMat& b) {
    NetworkParams p;
    p.kind = ParamKind::Scattering;
    p.n_ports = a.rows();
    p.z_ref = 50.0;
    p.grid = FrequencyGrid({1e9, 2e9});
    p.matrices = {a, b};
    return p;
}

std::vector<std::string> tokens_of(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> t;
    std::string w;
    while (is >> w) t.push_back(w);
    return t;
}

}  // namespace

TEST_CASE("frequency grid validation") {
    CHECK_THROWS_AS(FrequencyGrid(std::vector<double>{}), Error);
    CHECK_THROWS_AS(FrequencyGrid({1e9, 1e9}), NonMonotoneFrequency);
    CHECK_THROWS_AS(FrequencyGrid({2e9, 1e9}), NonMonotoneFrequency);
    CHECK_THROWS_AS(FrequencyGrid({0.0, 1e9}), Error);
    const FrequencyGrid g({1e9, 2e9, 3e9});
    CHECK(g.min() == 1e9);
    CHECK(g.max() == 3e9);
}

TEST_CASE("touchstone one-port basics") {
    // zero reflection at 1 GHz
    const NetworkParams s = parse_touchstone("# GHz S RI R 50\n1.0 0 0\n");
    CHECK(s.kind == ParamKind::Scattering);
    CHECK(s.n_ports == 1);
    CHECK(s.z_ref == 50.0);
    CHECK(s.grid.points == std::vector<double>{1e9});
    CHECK(s.matrices[0](0, 0) == cd(0.0, 0.0));

    // magnitude-angle identity: 50 at angle 0 is 50 + 0j
    const NetworkParams z = parse_touchstone("# MHz Z MA R 50\n100 50 0\n");
    CHECK(z.kind == ParamKind::Impedance);
    CHECK(z.grid.points == std::vector<double>{1e8});
    CHECK(std::abs(z.matrices[0](0, 0) - cd(50.0, 0.0)) < 1e-12);

    // dB format: -6.0206 dB is magnitude 0.5, at 90 degrees that is 0.5j
    const NetworkParams d = parse_touchstone("# Hz S DB R 50\n1 -6.02059991327962 90\n");
    CHECK(std::abs(d.matrices[0](0, 0) - cd(0.0, 0.5)) < 1e-12);
}

TEST_CASE("touchstone comments and two-port column order") {
    const std::string text =
        "! fixture with inline comments\n"
        "# GHz S RI R 75 ! option line\n"
        "\n"
        "1.0 1 2 3 4 5 6 7 8 ! S11 S21 S12 S22\n";
    const NetworkParams p = parse_touchstone(text);
    CHECK(p.n_ports == 2);
    CHECK(p.z_ref == 75.0);
    CHECK(p.matrices[0](0, 0) == cd(1, 2));
    CHECK(p.matrices[0](1, 0) == cd(3, 4));  // S21 comes before S12
    CHECK(p.matrices[0](0, 1) == cd(5, 6));
    CHECK(p.matrices[0](1, 1) == cd(7, 8));
}

TEST_CASE("touchstone multiport row layout") {
    // 3-port: matrix rows on their own lines, frequency on the first
    const std::string t3 =
        "# Hz S RI R 50\n"
        "10 1 0 2 0 3 0\n"
        "4 0 5 0 6 0\n"
        "7 0 8 0 9 0\n";
    const NetworkParams p3 = parse_touchstone(t3);
    CHECK(p3.n_ports == 3);
    CHECK(p3.matrices[0](0, 2) == cd(3, 0));
    CHECK(p3.matrices[0](2, 0) == cd(7, 0));  // row-major for n >= 3

    // 4-port first line also has 9 tokens; the 8-value follow-up line
    // disambiguates it from a complete 2-port record.
    std::string t4 = "# Hz S RI R 50\n";
    t4 += "10 11 0 12 0 13 0 14 0\n";
    t4 += "21 0 22 0 23 0 24 0\n";
    t4 += "31 0 32 0 33 0 34 0\n";
    t4 += "41 0 42 0 43 0 44 0\n";
    const NetworkParams p4 = parse_touchstone(t4);
    CHECK(p4.n_ports == 4);
    CHECK(p4.grid.points == std::vector<double>{10.0});
    CHECK(p4.matrices[0](0, 0) == cd(11, 0));
    CHECK(p4.matrices[0](3, 2) == cd(43, 0));
}

TEST_CASE("touchstone error reporting") {
    CHECK_THROWS_AS(parse_touchstone(""), SyntaxError);
    CHECK_THROWS_AS(parse_touchstone("1.0 0 0\n# GHz S RI R 50\n"), SyntaxError);
    CHECK_THROWS_AS(parse_touchstone("# GHz S RI R 50\n"), SyntaxError);
    CHECK_THROWS_AS(parse_touchstone("# GHz Y RI R 50\n1 0 0\n"), UnsupportedFormat);
    CHECK_THROWS_AS(parse_touchstone("[Version] 2.0\n# GHz S RI R 50\n1 0 0\n"),
                    UnsupportedFormat);
    CHECK_THROWS_AS(parse_touchstone("# GHz S RI R 50\n2 0 0\n1 0 0\n"), NonMonotoneFrequency);
    CHECK_THROWS_AS(parse_touchstone("# parsec S RI R 50\n1 0 0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_touchstone("# GHz S RI R 50\n1 0 0 0\n"), SyntaxError);

    try {
        parse_touchstone("# GHz S RI R 50\n1.0 0 zebra\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);  // carries the offending line number
    }
}

TEST_CASE("touchstone write/parse fixed point") {
    const std::string fixture =
        "! 2-port S-parameters\n"
        "# Hz S RI R 50\n"
        "1000000000 0.1 -0.2 0.31 0.04 0.31 0.04 -0.5 0.25\n"
        "2000000000 0.11 -0.21 0.3 0.05 0.3 0.05 -0.45 0.2\n";
    const NetworkParams p1 = parse_touchstone(fixture);
    const std::string w1 = write_touchstone(p1);
    CHECK(tokens_of(w1) == tokens_of(fixture));  // byte-comparable modulo whitespace
    const NetworkParams p2 = parse_touchstone(w1);
    CHECK(write_touchstone(p2) == w1);  // parse-write fixed point

    // same round trip for a 4-port with full double-precision entries
    const NetworkParams arr =
        synth_coupled_array(4, 0.6, 1.0, FrequencyGrid({0.9e9, 1.0e9, 1.1e9}), 11);
    const std::string wa = write_touchstone(arr);
    const NetworkParams back = parse_touchstone(wa);
    CHECK(write_touchstone(back) == wa);
    REQUIRE(back.n_ports == 4);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(max_diff(back.matrices[i], arr.matrices[i]) < 1e-10);
}

TEST_CASE("impedance-scattering conversion") {
    const CMat i2 = CMat::identity(2);

    // matched termination reflects nothing
    CHECK(max_abs(z_to_s(50.0 * i2, 50.0)) < 1e-14);
    // a short reflects everything with sign flip
    CHECK(max_diff(z_to_s(CMat(2, 2), 50.0), -1.0 * i2) < 1e-14);

    const CMat zd(1, 1, {cd(73.1, 42.5)});
    CHECK(max_diff(s_to_z(z_to_s(zd, 50.0), 50.0), zd) < 1e-12);

    CHECK_THROWS_AS(s_to_z(CMat::identity(3), 50.0), SingularConversion);

    // round trips for random reciprocal Z with positive definite real part
    Rng rng(21);
    for (double zr : {25.0, 50.0, 75.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            const CMat g = random_mat(rng, 4, 4);
            CMat z = g + transpose(g);  // symmetric
            z += 1.5 * max_abs(z) * CMat::identity(4);  // push Re{Z} positive definite
            z = 40.0 * z;
            const CMat s = z_to_s(z, zr);
            CHECK(max_diff(s, transpose(s)) < 1e-9 * max_abs(s));  // reciprocity survives
            CHECK(max_diff(s_to_z(s, zr), z) < 1e-10 * max_abs(z));
        }
    }
}

TEST_CASE("grid interpolation") {
    Rng rng(31);
    const CMat a = random_mat(rng, 3, 3);
    const CMat b = random_mat(rng, 3, 3);
    const NetworkParams p = two_point_params(a, b);

    CHECK(max_diff(interpolate(p, 1e9), a) == 0.0);  // exact at grid points
    CHECK(max_diff(interpolate(p, 2e9), b) == 0.0);
    CHECK(max_diff(interpolate(p, 1.5e9), 0.5 * (a + b)) < 1e-15);
    CHECK(max_diff(interpolate(p, 1.25e9), 0.75 * a + 0.25 * b) < 1e-15);
    CHECK_THROWS_AS(interpolate(p, 0.5e9), OutOfBand);
    CHECK_THROWS_AS(interpolate(p, 2.5e9), OutOfBand);
}

TEST_CASE("passivity report") {
    const CMat z2(2, 2);
    NetworkParams p = two_point_params(z2, z2);
    PassivityReport rep = check_passivity(p);
    CHECK(rep.passive);
    CHECK(rep.max_singular == std::vector<double>{0.0, 0.0});

    p.matrices[1] = 1.5 * CMat::identity(2);
    rep = check_passivity(p);
    CHECK_FALSE(rep.passive);
    CHECK(rep.worst_frequency == 2e9);
    CHECK(std::abs(rep.max_singular[1] - 1.5) < 1e-12);

    // 0.9 * U D V^H with D <= 1 keeps sigma_max <= 0.9
    Rng rng(41);
    const SvdResult r = svd(random_mat(rng, 3, 3));
    std::vector<double> d(3);
    for (auto& v : d) v = rng.uniform();
    const CMat soft = 0.9 * (r.u * diag_matrix(d) * adjoint(r.v));
    p.matrices = {soft, soft};
    CHECK(check_passivity(p).passive);

    p.kind = ParamKind::Impedance;
    CHECK_THROWS_AS(check_passivity(p), WrongKind);
}

TEST_CASE("dipole impedance against closed forms") {
    const double f = 1e9;
    const double lambda = 299792458.0 / f;
    const double l = 0.5 * lambda;

    const CMat z = dipole_pair_impedance(f, 0.5 * lambda, l);
    CHECK(z(0, 1) == z(1, 0));  // symmetric exactly by construction
    CHECK(z(0, 0) == z(1, 1));

    // textbook half-wave numbers
    CHECK(std::abs(z(0, 0).real() - 73.1) < 0.5);
    CHECK(std::abs(z(0, 0).imag() - 42.5) < 0.5);
    CHECK(std::abs(z(0, 1).real() - (-12.5)) < 0.5);
    CHECK(std::abs(z(0, 1).imag() - (-29.9)) < 0.5);

    // quadrature must agree with the sine/cosine-integral closed forms
    const cd self = self_oracle(l, l / 200.0, lambda);
    CHECK(std::abs(z(0, 0) - self) < 0.2);
    for (double spacing : {0.5 * lambda, 0.75 * lambda, 1.0 * lambda}) {
        const cd want = mutual_halfwave_oracle(spacing, lambda);
        const CMat zz = dipole_pair_impedance(f, spacing, l);
        CHECK(std::abs(zz(0, 1) - want) < 0.01);
    }

    // non-resonant length, input-referred closed form (same default radius)
    const double l2 = 0.45 * lambda;
    const CMat z2 = dipole_pair_impedance(f, 0.5 * lambda, l2);
    CHECK(std::abs(z2(0, 0) - self_oracle(l2, l2 / 2000.0, lambda)) < 0.5);

    // far apart the coupling vanishes
    const CMat zfar = dipole_pair_impedance(f, 20.0 * lambda, l);
    CHECK(std::abs(zfar(0, 1)) <= 1.0);

    // impedance depends only on geometry measured in wavelengths
    const CMat zs = dipole_pair_impedance(2e9, 0.25 * lambda, 0.5 * l);
    CHECK(std::abs(zs(0, 1) - z(0, 1)) < 1e-4);
}

TEST_CASE("synthetic coupled array") {
    const FrequencyGrid grid({0.8e9, 0.9e9, 1.0e9, 1.1e9, 1.2e9});

    // coupling 0 leaves nothing anywhere (trivially diagonal)
    const NetworkParams none = synth_coupled_array(4, 0.0, 1.0, grid, 7);
    for (const CMat& m : none.matrices) CHECK(max_abs(m) == 0.0);

    // selectivity 0 freezes the frequency axis
    const NetworkParams flat = synth_coupled_array(4, 0.5, 0.0, grid, 7);
    for (std::size_t i = 1; i < flat.matrices.size(); ++i)
        CHECK(max_diff(flat.matrices[i], flat.matrices[0]) == 0.0);

    // with no ripple the magnitude envelope is exact: |S_ij| = c e^{-|i-j|}
    CHECK(std::abs(std::abs(flat.matrices[0](0, 0)) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(flat.matrices[0](0, 1)) - 0.5 * std::exp(-1.0)) < 1e-12);
    CHECK(std::abs(std::abs(flat.matrices[0](0, 2)) - 0.5 * std::exp(-2.0)) < 1e-12);

    // deterministic in seed
    const NetworkParams again = synth_coupled_array(4, 0.5, 0.0, grid, 7);
    CHECK(max_diff(again.matrices[0], flat.matrices[0]) == 0.0);
    const NetworkParams other = synth_coupled_array(4, 0.5, 0.0, grid, 8);
    CHECK(max_diff(other.matrices[0], flat.matrices[0]) > 1e-3);

    // symmetric and passive at every grid point, even when clipping engages
    for (double coupling : {0.3, 0.7, 0.95}) {
        const NetworkParams p = synth_coupled_array(6, coupling, 2.0, grid, 99);
        const PassivityReport rep = check_passivity(p);
        CHECK(rep.passive);
        for (std::size_t i = 0; i < p.matrices.size(); ++i) {
            CHECK(rep.max_singular[i] <= 0.98 + 1e-12);
            CHECK(max_diff(p.matrices[i], transpose(p.matrices[i])) < 1e-12);
        }
    }
}
