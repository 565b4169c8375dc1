#include "mpmimo/channel.hpp"

#include <cmath>
#include <vector>

#include "mpmimo/errors.hpp"
#include "mpmimo/linalg.hpp"
#include "mpmimo/netparams.hpp"
#include "mpmimo/rng.hpp"

namespace mpmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Column norms ||S e_i||^2, i.e. the diagonal of S^H S.
std::vector<double> gram_diagonal(const CMat& s) {
    std::vector<double> d(s.cols(), 0.0);
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j) d[j] += std::norm(s(i, j));
    return d;
}

CMat gram(const CMat& s) { return adjoint(s) * s; }

// I - S^H S, with positive-definiteness verified.
CMat passivity_gap(const CMat& s) {
    const CMat g = CMat::identity(s.cols()) - gram(s);
    const EigResult e = hermitian_eig(g);
    if (e.w.front() <= 0.0)
        throw NonPassiveArray("I - S^H S is not positive definite");
    return g;
}

CMat checked_inverse(const CMat& m) {
    const SvdResult r = svd(m);
    const double smin = r.s.empty() ? 0.0 : r.s.back();
    if (smin <= 0.0 || r.s.front() / smin > 1e12)
        throw SingularTermination("termination sum is singular or near-singular");
    std::vector<double> inv(r.s.size());
    for (std::size_t i = 0; i < r.s.size(); ++i) inv[i] = 1.0 / r.s[i];
    return r.v * diag_matrix(inv) * adjoint(r.u);
}

// sqrt(I - diag(S^H S)) as a diagonal matrix, with the port check.
CMat front_half(const CMat& s) {
    const auto d = gram_diagonal(s);
    CMat f(s.cols(), s.cols());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] >= 1.0) throw NonPassivePort("antenna port reflects all power");
        f(i, i) = cd(std::sqrt(1.0 - d[i]), 0.0);
    }
    return f;
}

}  // namespace

void RfChain::validate() const {
    if (!(beta > 0.0)) throw Error("rf chain: beta must be positive");
    if (!(z_ref > 0.0)) throw Error("rf chain: z_ref must be positive");
    if (!(r_in > 0.0)) throw Error("rf chain: r_in must be positive");
    if (!(noise_figure >= 1.0)) throw Error("rf chain: noise figure must be >= 1");
    if (!(temperature > 0.0)) throw Error("rf chain: temperature must be positive");
    if (!(bandwidth > 0.0)) throw Error("rf chain: bandwidth must be positive");
}

std::pair<CMat, CMat> front_matrices(const CMat& s_t, const CMat& s_r, double beta) {
    CMat f = front_half(s_t);
    CMat q = front_half(s_r);
    q *= cd(beta / 4.0, 0.0);
    return {std::move(f), std::move(q)};
}

std::pair<CMat, CMat> spatial_correlation_halves(const CMat& s_t, const CMat& s_r) {
    const auto dt = gram_diagonal(s_t);
    const auto dr = gram_diagonal(s_r);
    for (double v : dt)
        if (v >= 1.0) throw NonPassiveArray("transmit array absorbs nothing on some port");
    for (double v : dr)
        if (v >= 1.0) throw NonPassiveArray("receive array absorbs nothing on some port");

    std::vector<double> it(dt.size()), ir(dr.size());
    for (std::size_t i = 0; i < dt.size(); ++i) it[i] = 1.0 / std::sqrt(1.0 - dt[i]);
    for (std::size_t i = 0; i < dr.size(); ++i) ir[i] = 1.0 / std::sqrt(1.0 - dr[i]);

    const CMat rt = herm_sqrt(passivity_gap(s_t)) * diag_matrix(it);
    const CMat rr = diag_matrix(ir) * herm_sqrt(passivity_gap(s_r));
    return {rt, rr};
}

ChannelRealization draw_channel(const CMat& rt_half, const CMat& rr_half, const CMat& f,
                                const CMat& q, std::uint64_t seed) {
    const std::size_t n_r = rr_half.rows();
    const std::size_t n_t = rt_half.rows();
    Rng rng(seed);
    ChannelRealization out;
    out.Hw = CMat(n_r, n_t);
    for (std::size_t i = 0; i < n_r; ++i)
        for (std::size_t j = 0; j < n_t; ++j) out.Hw(i, j) = rng.cnormal();
    out.H = rr_half * out.Hw * rt_half;
    out.H_eff = q * out.H * f;
    return out;
}

CMat effective_channel_scattering(const CMat& s_t, const CMat& s_r, const CMat& h_prop,
                                  double beta) {
    const auto [f, q] = front_matrices(s_t, s_r, beta);
    return q * h_prop * f;
}

CMat effective_channel_impedance(const CMat& z_s, const CMat& z_t, const CMat& z_r,
                                 const CMat& z_l, const CMat& z_rt, double beta) {
    return beta * (z_l * checked_inverse(z_r + z_l)) * z_rt * checked_inverse(z_t + z_s);
}

CMat terminated_channel_from_oc(const CMat& z_s, const CMat& z_t, const CMat& z_r,
                                const CMat& z_l, const CMat& h_oc, double z_ref) {
    const CMat s_t = z_to_s(z_t, z_ref);
    const CMat s_r = z_to_s(z_r, z_ref);
    const auto dt = adjoint(s_t) * s_t;
    const auto dr = adjoint(s_r) * s_r;

    std::vector<double> rt(z_t.rows()), rr(z_r.rows()), idt(z_t.rows()), idr(z_r.rows());
    for (std::size_t i = 0; i < z_t.rows(); ++i) {
        rt[i] = std::sqrt(z_t(i, i).real());
        idt[i] = 1.0 / std::sqrt(1.0 - dt(i, i).real());
    }
    for (std::size_t i = 0; i < z_r.rows(); ++i) {
        rr[i] = std::sqrt(z_r(i, i).real());
        idr[i] = 1.0 / std::sqrt(1.0 - dr(i, i).real());
    }
    const CMat z_rt = diag_matrix(rr) * h_oc * diag_matrix(rt);
    return 4.0 * (diag_matrix(idr) * (z_l * checked_inverse(z_r + z_l)) * z_rt *
                  checked_inverse(z_t + z_s) * diag_matrix(idt));
}

CMat friis_los_channel(double f_hz, double distance_m, double gain, std::size_t n_r,
                       std::size_t n_t) {
    if (!(f_hz > 0.0) || !(distance_m > 0.0)) throw Error("frequency and distance must be positive");
    const double a = kSpeedOfLight / (4.0 * kPi * f_hz * distance_m) * gain;
    CMat h(n_r, n_t);
    for (std::size_t i = 0; i < n_r; ++i)
        for (std::size_t j = 0; j < n_t; ++j) h(i, j) = cd(a, 0.0);
    return h;
}

CMat noise_covariance_scattering(const CMat& s_r, const RfChain& chain) {
    chain.validate();
    const double kt = kBoltzmann * chain.temperature;
    const double b2 = chain.beta * chain.beta;
    CMat rn = (kt * b2 * chain.z_ref) * passivity_gap(s_r);
    const double intrinsic = 4.0 * b2 * kt * (chain.noise_figure - 1.0) * chain.r_in;
    for (std::size_t i = 0; i < rn.rows(); ++i) rn(i, i) += cd(intrinsic, 0.0);
    return rn;
}

CMat noise_covariance_impedance(const CMat& z_r, const CMat& z_l, const RfChain& chain) {
    chain.validate();
    const double kt = kBoltzmann * chain.temperature;
    const double b2 = chain.beta * chain.beta;
    CMat re_zr(z_r.rows(), z_r.cols());
    for (std::size_t i = 0; i < z_r.rows(); ++i)
        for (std::size_t j = 0; j < z_r.cols(); ++j) re_zr(i, j) = cd(z_r(i, j).real(), 0.0);
    const CMat gain = z_l * checked_inverse(z_r + z_l);
    CMat rn = (4.0 * kt * b2) * (gain * re_zr * adjoint(gain));
    const double intrinsic = 4.0 * kt * b2 * (chain.noise_figure - 1.0) * chain.r_in;
    for (std::size_t i = 0; i < rn.rows(); ++i) rn(i, i) += cd(intrinsic, 0.0);
    return rn;
}

CMat discrete_noise_sc(const CMat& rn_continuous, const RfChain& chain) {
    return chain.bandwidth * rn_continuous;
}

CMat discrete_noise_ofdm(const CMat& rn_continuous, const RfChain& chain,
                         std::size_t n_subcarriers) {
    if (n_subcarriers == 0) throw Error("subcarrier count must be positive");
    return (chain.bandwidth / static_cast<double>(n_subcarriers)) * rn_continuous;
}

VecCovariances vec_covariances(const CMat& f, const CMat& q, const CMat& rt_half,
                               const CMat& rr_half) {
    VecCovariances out;
    out.r_h = kron(transpose(rt_half) * conjugate(rt_half), rr_half * adjoint(rr_half));
    out.t = kron(transpose(f), q);
    out.r_heff = out.t * out.r_h * adjoint(out.t);
    return out;
}

double large_scale_rho(double f_hz, double d_m, double d_ref_m, double alpha) {
    if (!(f_hz > 0.0) || !(d_m > 0.0) || !(d_ref_m > 0.0))
        throw Error("frequency and distances must be positive");
    const double a = kSpeedOfLight / (4.0 * kPi * f_hz * d_ref_m);
    return a * a * std::pow(d_ref_m / d_m, alpha);
}

}  // namespace mpmimo
