#include "mpmimo/estimate_mc.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "mpmimo/errors.hpp"
#include "mpmimo/linalg.hpp"
#include "mpmimo/rng.hpp"

namespace mpmimo {
namespace {

// e^{j 2 pi (num / den)} with the ratio reduced modulo den, so large index
// products do not lose phase accuracy.
cd unit_phase(long long num, std::size_t den) {
    const long long d = static_cast<long long>(den);
    long long r = num % d;
    if (r < 0) r += d;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) /
                               static_cast<double>(d));
}

CMat blockdiag(const std::vector<CMat>& blocks) {
    std::size_t rows = 0, cols = 0;
    for (const CMat& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    CMat out(rows, cols);
    std::size_t r0 = 0, c0 = 0;
    for (const CMat& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) out(r0 + i, c0 + j) = b(i, j);
        r0 += b.rows();
        c0 += b.cols();
    }
    return out;
}

// Writes `block` into `dst` starting at (r0, c0).
void place(CMat& dst, const CMat& block, std::size_t r0, std::size_t c0) {
    for (std::size_t i = 0; i < block.rows(); ++i)
        for (std::size_t j = 0; j < block.cols(); ++j) dst(r0 + i, c0 + j) = block(i, j);
}

// Row vector [1, e^{-j 2 pi k / K}, ..., e^{-j 2 pi k (L-1) / K}].
CMat dft_row(std::size_t k, std::size_t l_taps, std::size_t k_total) {
    CMat u(1, l_taps);
    for (std::size_t l = 0; l < l_taps; ++l)
        u(0, l) = unit_phase(-static_cast<long long>(k * l), k_total);
    return u;
}

}  // namespace

void OfdmConfig::validate() const {
    if (K == 0) throw DimensionMismatch("subcarrier count must be positive");
    if (L < 1 || L > K) throw DimensionMismatch("tap count must satisfy 1 <= L <= K");
    if (L_t < 1) throw DimensionMismatch("need at least one pilot time slot");
    if (!(bandwidth > 0.0)) throw Error("bandwidth must be positive");
    if (n_t == 0 || n_r == 0) throw DimensionMismatch("array sizes must be positive");
    if (f_k.size() != K) throw DimensionMismatch("need one frequency per subcarrier");
    const double step = bandwidth / static_cast<double>(K);
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double d = f_k[k + 1] - f_k[k];
        if (!(d > 0.0)) throw NonMonotoneFrequency("subcarrier frequencies must increase");
        if (std::abs(d - step) > 1e-6 * step)
            throw Error("subcarrier frequencies must be uniformly spaced over the bandwidth");
    }
    if (!(f_k.front() > 0.0)) throw Error("subcarrier frequencies must be positive");
}

OfdmConfig OfdmConfig::uniform(std::size_t k, std::size_t l, std::size_t l_t, double f_min,
                               double bandwidth, std::size_t n_t, std::size_t n_r) {
    OfdmConfig cfg;
    cfg.K = k;
    cfg.L = l;
    cfg.L_t = l_t;
    cfg.bandwidth = bandwidth;
    cfg.n_t = n_t;
    cfg.n_r = n_r;
    cfg.f_k.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        cfg.f_k[i] = f_min + static_cast<double>(i) * bandwidth / static_cast<double>(k);
    cfg.validate();
    return cfg;
}

TapChannel draw_taps(std::size_t l, std::size_t n_r, std::size_t n_t, std::uint64_t seed) {
    if (l == 0 || n_r == 0 || n_t == 0) throw DimensionMismatch("empty tap channel");
    Rng rng(seed);
    TapChannel ch;
    ch.taps.reserve(l);
    for (std::size_t tap = 0; tap < l; ++tap) {
        CMat h(n_r, n_t);
        for (std::size_t i = 0; i < n_r; ++i)
            for (std::size_t j = 0; j < n_t; ++j) h(i, j) = rng.cnormal();
        ch.taps.push_back(std::move(h));
    }
    return ch;
}

SubcarrierFronts per_subcarrier_fronts(const std::vector<CMat>& s_t,
                                       const std::vector<CMat>& s_r, double beta) {
    if (s_t.empty() || s_t.size() != s_r.size())
        throw DimensionMismatch("need one scattering matrix per subcarrier at each end");
    if (!(beta > 0.0)) throw Error("LNA gain must be positive");
    SubcarrierFronts out;
    out.f.reserve(s_t.size());
    out.q.reserve(s_r.size());
    for (std::size_t k = 0; k < s_t.size(); ++k) {
        const auto invert_gap = [](const CMat& s) {
            if (!s.square()) throw DimensionMismatch("scattering matrix must be square");
            const CMat gap =
                hermitian_part(CMat::identity(s.rows()) - adjoint(s) * s);
            try {
                return hermitian_solve(gap, CMat::identity(s.rows()));
            } catch (const NotPositiveDefinite&) {
                throw NonPassiveArray("I - S^H S is not positive definite");
            }
        };
        out.f.push_back(invert_gap(s_t[k]));
        out.q.push_back((beta / 4.0) * invert_gap(s_r[k]));
    }
    return out;
}

std::vector<CMat> taps_to_freq(const TapChannel& taps, std::size_t k_subcarriers) {
    const std::size_t l_taps = taps.n_taps();
    if (l_taps == 0) throw DimensionMismatch("empty tap channel");
    if (l_taps > k_subcarriers) throw DimensionMismatch("more taps than subcarriers");
    std::vector<CMat> freq;
    freq.reserve(k_subcarriers);
    for (std::size_t k = 0; k < k_subcarriers; ++k) {
        CMat h(taps.taps[0].rows(), taps.taps[0].cols());
        for (std::size_t l = 0; l < l_taps; ++l) {
            if (!taps.taps[l].same_shape(h)) throw DimensionMismatch("ragged tap channel");
            h += unit_phase(-static_cast<long long>(l * k), k_subcarriers) * taps.taps[l];
        }
        freq.push_back(std::move(h));
    }
    return freq;
}

McStacking build_stacking(const OfdmConfig& cfg, const CMat& pilots,
                          const SubcarrierFronts& fronts,
                          const std::vector<CMat>& noise_chol) {
    cfg.validate();
    const std::size_t K = cfg.K, L = cfg.L, L_t = cfg.L_t, n_t = cfg.n_t, n_r = cfg.n_r;
    if (pilots.rows() != n_t || pilots.cols() != K * L_t)
        throw DimensionMismatch("pilot matrix must be N_t x (K * L_t)");
    if (fronts.f.size() != K || fronts.q.size() != K)
        throw DimensionMismatch("need one front pair per subcarrier");
    if (noise_chol.size() != K)
        throw DimensionMismatch("need one noise Cholesky factor per subcarrier");

    McStacking st;
    const CMat eye_r = CMat::identity(n_r);
    std::vector<CMat> p_k_factors;
    p_k_factors.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (fronts.f[k].rows() != n_t || fronts.q[k].rows() != n_r ||
            noise_chol[k].rows() != n_r)
            throw DimensionMismatch("front or noise factor does not match the array sizes");
        p_k_factors.push_back(solve(noise_chol[k], fronts.q[k]));
    }

    st.b_mat = CMat(K * L_t * n_r, L * n_t * n_r);
    st.b_prime = CMat(K * L_t * n_r, K * n_t * n_r);
    st.m = CMat(K * L_t * n_r, L * n_t * n_r);
    for (std::size_t t = 0; t < L_t; ++t)
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t row0 = (t * K + k) * n_r;
            CMat x(n_t, 1);
            for (std::size_t j = 0; j < n_t; ++j) x(j, 0) = pilots(j, t * K + k);
            const CMat u_row = dft_row(k, L, K);
            place(st.b_mat, kron(u_row, kron(transpose(x), eye_r)), row0, 0);
            place(st.b_prime, kron(transpose(x), eye_r), row0, k * n_t * n_r);
            place(st.m, kron(u_row, kron(transpose(fronts.f[k] * x), p_k_factors[k])),
                  row0, 0);
        }

    st.partial_dft = CMat(L, K);
    for (std::size_t m = 0; m < L; ++m)
        for (std::size_t n = 0; n < K; ++n)
            st.partial_dft(m, n) = unit_phase(static_cast<long long>(m * n), K);

    // vec([H[0] .. H[L-1]]) is ordered tap-slowest / tx / rx-fastest; P_L
    // regroups taps within each transmit antenna so the DFT can act on them,
    // and P_K regroups the result by subcarrier.
    st.p_l = CMat(L * n_t * n_r, L * n_t * n_r);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t j = 0; j < n_t; ++j)
            for (std::size_t i = 0; i < n_r; ++i)
                st.p_l((j * L + l) * n_r + i, (l * n_t + j) * n_r + i) = cd(1.0, 0.0);
    st.p_k = CMat(K * n_t * n_r, K * n_t * n_r);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < n_t; ++j)
            for (std::size_t i = 0; i < n_r; ++i)
                st.p_k((k * n_t + j) * n_r + i, (j * K + k) * n_r + i) = cd(1.0, 0.0);

    st.c2 = st.p_k * kron(CMat::identity(n_t), kron(adjoint(st.partial_dft), eye_r)) * st.p_l;

    std::vector<CMat> d_blocks;
    d_blocks.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
        d_blocks.push_back(kron(transpose(fronts.f[k]), fronts.q[k]));
    st.d = blockdiag(d_blocks);
    st.c1 = st.d * st.c2;
    return st;
}

McConstants freq_covariance_and_constants(const CMat& c1, const OfdmConfig& cfg,
                                          const RfChain& chain) {
    cfg.validate();
    chain.validate();
    if (c1.rows() != cfg.K * cfg.n_t * cfg.n_r || c1.cols() != cfg.L * cfg.n_t * cfg.n_r)
        throw DimensionMismatch("conversion matrix does not match the layout");
    McConstants out;
    out.r_hs_eff = hermitian_part(c1 * adjoint(c1));
    out.c3 = cfg.bandwidth / static_cast<double>(cfg.K) * kBoltzmann * chain.temperature *
             chain.beta * chain.beta *
             (chain.z_ref + 4.0 * (chain.noise_figure - 1.0) * chain.r_in);
    out.c4 = trace(out.r_hs_eff).real() /
             static_cast<double>(cfg.n_r * cfg.n_t * cfg.L);
    return out;
}

CMat ab_estimate_ofdm(const CMat& y_bar, const CMat& b_mat, double rho, double c3,
                      double c4) {
    if (y_bar.cols() != 1 || y_bar.rows() != b_mat.rows())
        throw DimensionMismatch("stacked observation does not match the model operator");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");
    CMat gram = adjoint(b_mat) * b_mat;
    gram *= cd(rho * c4, 0.0);
    gram += cd(c3, 0.0) * CMat::identity(b_mat.cols());
    const CMat w = hermitian_solve(hermitian_part(gram), adjoint(b_mat) * y_bar);
    return std::sqrt(rho) * c4 * w;
}

CMat ab_mse_ofdm(const McStacking& st, double rho, double c3, double c4,
                 const CMat& r_hs_eff, const std::vector<CMat>& rn_k) {
    const std::size_t rows = st.b_mat.rows();
    const std::size_t n_freq = st.b_prime.cols();
    if (r_hs_eff.rows() != n_freq || r_hs_eff.cols() != n_freq)
        throw DimensionMismatch("frequency covariance does not match the layout");
    if (rn_k.empty() || rows % (rn_k.size() * rn_k[0].rows()) != 0)
        throw DimensionMismatch("noise covariances do not tile the observation");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");

    // True stacked noise: blockdiag over subcarriers, repeated per time slot.
    const std::size_t l_t = rows / (rn_k.size() * rn_k[0].rows());
    const CMat rn_bar = kron(CMat::identity(l_t), blockdiag(rn_k));

    // Frequency-mapped blind filter G = C2 W^H with W as printed, evaluated
    // through the Gram form.
    CMat gram = adjoint(st.b_mat) * st.b_mat;
    gram *= cd(rho * c4, 0.0);
    gram += cd(c3, 0.0) * CMat::identity(st.b_mat.cols());
    const CMat g = (std::sqrt(rho) * c4) *
                   (st.c2 * hermitian_solve(hermitian_part(gram), adjoint(st.b_mat)));

    const CMat ar = st.b_prime * r_hs_eff;  // B' R
    const CMat cross = std::sqrt(rho) * (adjoint(ar) * adjoint(g));
    const CMat mid = rn_bar + rho * (ar * adjoint(st.b_prime));
    const CMat e = r_hs_eff - cross - adjoint(cross) + g * (mid * adjoint(g));
    return hermitian_part(e);
}

McEstimate aa_estimate_ofdm(const CMat& y_bar_prime, const McStacking& st, double rho) {
    if (y_bar_prime.cols() != 1 || y_bar_prime.rows() != st.m.rows())
        throw DimensionMismatch("stacked observation does not match the model operator");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");
    CMat gram = adjoint(st.m) * st.m;
    gram *= cd(rho, 0.0);
    gram += CMat::identity(st.m.cols());
    const CMat w = hermitian_solve(hermitian_part(gram), adjoint(st.m) * y_bar_prime);
    McEstimate out;
    out.vec_h_time = std::sqrt(rho) * w;
    out.vec_h_eff_freq = st.c1 * out.vec_h_time;
    out.method = EstimatorKind::AntennaAware;
    return out;
}

AaMse aa_mse_ofdm(const CMat& m, double rho, const CMat& c1) {
    if (c1.cols() != m.cols())
        throw DimensionMismatch("conversion matrix does not match the model operator");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");
    // I - rho M^H (I + rho M M^H)^-1 M collapses to (I + rho M^H M)^-1.
    CMat gram = adjoint(m) * m;
    gram *= cd(rho, 0.0);
    gram += CMat::identity(m.cols());
    AaMse out;
    out.e_h = hermitian_part(hermitian_solve(hermitian_part(gram), CMat::identity(m.cols())));
    out.e_heff = hermitian_part(c1 * out.e_h * adjoint(c1));
    return out;
}

double tap_spreading_energy(const SubcarrierFronts& fronts, const TapChannel& taps) {
    const std::size_t K = fronts.f.size();
    const std::size_t L = taps.n_taps();
    if (K == 0) throw DimensionMismatch("need at least one subcarrier");
    const std::vector<CMat> freq = taps_to_freq(taps, K);
    std::vector<CMat> eff;
    eff.reserve(K);
    for (std::size_t k = 0; k < K; ++k) eff.push_back(fronts.q[k] * freq[k] * fronts.f[k]);

    double total = 0.0, outside = 0.0;
    for (std::size_t l = 0; l < K; ++l) {
        CMat g(eff[0].rows(), eff[0].cols());
        for (std::size_t k = 0; k < K; ++k)
            g += unit_phase(static_cast<long long>(k * l), K) * eff[k];
        g *= cd(1.0 / static_cast<double>(K), 0.0);
        const double e = fro_norm(g) * fro_norm(g);
        total += e;
        if (l >= L) outside += e;
    }
    return total > 0.0 ? outside / total : 0.0;
}

}  // namespace mpmimo
