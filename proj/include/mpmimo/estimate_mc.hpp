#pragma once

#include <cstdint>
#include <vector>

#include "mpmimo/channel.hpp"
#include "mpmimo/estimate_sc.hpp"
#include "mpmimo/mat.hpp"

namespace mpmimo {

// Multicarrier layout: K subcarriers spanning a total bandwidth, an assumed
// tap count L for the estimators, and L_t pilot time slots.
struct OfdmConfig {
    std::size_t K = 1;
    std::size_t L = 1;
    std::size_t L_t = 1;
    double bandwidth = 5e6;       // Hz, total across the K subcarriers
    std::vector<double> f_k;      // strictly increasing, uniformly spaced
    std::size_t n_t = 1;
    std::size_t n_r = 1;

    void validate() const;

    // f_k = f_min + k * (bandwidth / K), k = 0 .. K-1.
    static OfdmConfig uniform(std::size_t k, std::size_t l, std::size_t l_t, double f_min,
                              double bandwidth, std::size_t n_t, std::size_t n_r);
};

// Time-domain propagation channel: taps[l] is the N_r x N_t matrix of tap l.
struct TapChannel {
    std::vector<CMat> taps;

    std::size_t n_taps() const { return taps.size(); }
};

// i.i.d. CN(0,1) tap entries (uniform power-delay profile); one seed, one draw.
TapChannel draw_taps(std::size_t l, std::size_t n_r, std::size_t n_t, std::uint64_t seed);

// Per-subcarrier antenna fronts, full-inverse form:
//   F[k] = (I - S_T(f_k)^H S_T(f_k))^-1
//   Q[k] = (beta/4) (I - S_R(f_k)^H S_R(f_k))^-1
// Unlike the narrowband square-root fronts, these fold the antenna
// correlation and the network factor into a single matrix per subcarrier.
struct SubcarrierFronts {
    std::vector<CMat> f;
    std::vector<CMat> q;
};
SubcarrierFronts per_subcarrier_fronts(const std::vector<CMat>& s_t,
                                       const std::vector<CMat>& s_r, double beta);

// Frequency response H(k) = sum_l taps[l] e^{-j 2 pi l k / K} for k = 0..K-1:
// an entrywise K-point DFT of the zero-padded tap sequence.
std::vector<CMat> taps_to_freq(const TapChannel& taps, std::size_t k_subcarriers);

// Every stacked operator the OFDM estimators need. Observation rows run
// subcarrier-fastest, then time slot; tap vectors are vec([H[0] .. H[L-1]]).
struct McStacking {
    CMat b_mat;        // assumed model: rows u[k]^T kron x[k,t]^T kron I
    CMat b_prime;      // exact model: rows e_K[k]^T kron x[k,t]^T kron I
    CMat m;            // whitened model: rows u[k]^T kron (F[k]x[k,t])^T kron P[k]
    CMat c1;           // taps -> stacked effective frequency channel (D C2)
    CMat c2;           // taps -> stacked frequency channel (DFT + regrouping)
    CMat d;            // blockdiag(F[k]^T kron Q[k])
    CMat p_k;          // regroups [tx][subcarrier][rx] into [subcarrier][tx][rx]
    CMat p_l;          // regroups [tap][tx][rx] into [tx][tap][rx]
    CMat partial_dft;  // L x K, entry (m,n) = e^{+j 2 pi m n / K} (0-based)
};

// pilots: N_t x (K * L_t) with column (t*K + k) holding x[k,t].
// noise_chol: K lower Cholesky factors of the per-subcarrier noise covariance.
McStacking build_stacking(const OfdmConfig& cfg, const CMat& pilots,
                          const SubcarrierFronts& fronts,
                          const std::vector<CMat>& noise_chol);

// Stacked-frequency covariance R_Hs_eff = C1 C1^H (unit-variance taps) plus
// the scalar stand-ins used by the blind estimator:
//   c3 = (B/K) k_b T beta^2 (Z_0 + 4 (N_f - 1) R_in)
//   c4 = tr(C1 C1^H) / (N_r N_t L)
struct McConstants {
    CMat r_hs_eff;
    double c3 = 0.0;
    double c4 = 0.0;
};
McConstants freq_covariance_and_constants(const CMat& c1, const OfdmConfig& cfg,
                                          const RfChain& chain);

// W_AB = sqrt(rho) (c3 I + rho c4 B B^H)^-1 B c4 applied to the stacked
// observations. Returns the time-domain estimate of the effective taps
// (length L N_t N_r); map to frequency by multiplying with C2. Evaluated
// through the Gram form, which is algebraically identical.
CMat ab_estimate_ofdm(const CMat& y_bar, const CMat& b_mat, double rho, double c3, double c4);

// Frequency-domain error covariance of the blind OFDM estimator: the
// four-term expression with the truncated operator B and scalars c3/c4 in
// the filter, and the exact model (B', r_hs_eff, per-subcarrier noise) in
// the expectation. rn_k holds the K true discrete noise covariances.
CMat ab_mse_ofdm(const McStacking& st, double rho, double c3, double c4,
                 const CMat& r_hs_eff, const std::vector<CMat>& rn_k);

struct McEstimate {
    CMat vec_h_time;      // stacked tap estimate
    CMat vec_h_eff_freq;  // stacked per-subcarrier effective channel estimate
    EstimatorKind method = EstimatorKind::AntennaAware;
};

// W_AA = sqrt(rho) (I + rho M M^H)^-1 M under the unit tap covariance;
// the frequency-domain output is C1 times the tap estimate.
McEstimate aa_estimate_ofdm(const CMat& y_bar_prime, const McStacking& st, double rho);

// E_AA = I - rho M^H (I + rho M M^H)^-1 M and E_AA_eff = C1 E_AA C1^H.
AaMse aa_mse_ofdm(const CMat& m, double rho, const CMat& c1);

// Fraction of the effective channel's time-domain energy that falls outside
// the first L taps (L = taps.n_taps()), computed by inverse DFT of the
// per-subcarrier effective responses Q[k] H(k) F[k]. Selective fronts smear
// an L-tap channel across the whole window; flat fronts do not.
double tap_spreading_energy(const SubcarrierFronts& fronts, const TapChannel& taps);

}  // namespace mpmimo
