#pragma once

#include <cstdint>
#include <utility>

#include "mpmimo/mat.hpp"

namespace mpmimo {

// Boltzmann constant as used throughout the noise budgets.
constexpr double kBoltzmann = 1.38e-23;  // J/K
constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Receive/transmit RF chain description: LNA gain, reference impedance,
// amplifier input resistance, noise figure, physical temperature, bandwidth.
struct RfChain {
    double beta = 4.0;
    double z_ref = 50.0;
    double r_in = 50.0;
    double noise_figure = 2.0;
    double temperature = 290.0;
    double bandwidth = 5e6;

    void validate() const;
};

// Everything the estimators need about one carrier frequency.
struct LinkModel {
    double f_c = 0.0;
    CMat F;        // transmit front (N_t x N_t)
    CMat Q;        // receive front (N_r x N_r)
    CMat Rt_half;  // transmit correlation half
    CMat Rr_half;  // receive correlation half
    CMat R_n;      // discrete noise covariance (N_r x N_r)
    double rho = 1.0;  // large-scale gain
};

struct ChannelRealization {
    CMat Hw;     // i.i.d. CN(0,1) core
    CMat H;      // correlated propagation channel
    CMat H_eff;  // after both antenna fronts
};

// F = sqrt(I - diag(S_T^H S_T)), Q = (beta/4) sqrt(I - diag(S_R^H S_R)).
// Throws NonPassivePort when a column of either S has norm >= 1.
std::pair<CMat, CMat> front_matrices(const CMat& s_t, const CMat& s_r, double beta);

// Power-conservation correlation halves:
//   Rt_half = (I - S_T^H S_T)^{1/2} (I - diag(S_T^H S_T))^{-1/2}
//   Rr_half = (I - diag(S_R^H S_R))^{-1/2} (I - S_R^H S_R)^{1/2}
// Throws NonPassiveArray when I - S^H S is not positive definite.
std::pair<CMat, CMat> spatial_correlation_halves(const CMat& s_t, const CMat& s_r);

// H = Rr_half * Hw * Rt_half, H_eff = Q * H * F, Hw i.i.d. CN(0,1) from the
// seed. Deterministic: one seed, one realization.
ChannelRealization draw_channel(const CMat& rt_half, const CMat& rr_half, const CMat& f,
                                const CMat& q, std::uint64_t seed);

// (beta/4) sqrt(I - diag(S_R^H S_R)) * H * sqrt(I - diag(S_T^H S_T)).
CMat effective_channel_scattering(const CMat& s_t, const CMat& s_r, const CMat& h_prop,
                                  double beta);

// beta * Z_L (Z_R + Z_L)^-1 * Z_RT * (Z_T + Z_S)^-1 with the unilateral
// approximation (no receive-to-transmit coupling). Throws
// SingularTermination when a termination sum cannot be inverted.
CMat effective_channel_impedance(const CMat& z_s, const CMat& z_t, const CMat& z_r,
                                 const CMat& z_l, const CMat& z_rt, double beta);

// Terminated-pattern propagation channel equivalent to an open-circuit
// channel h_oc under the given terminations: feeding the result into
// effective_channel_scattering (with S parameters converted at z_ref)
// reproduces the impedance-description effective channel. The LNA gain
// cancels between the two descriptions, so it does not appear here.
CMat terminated_channel_from_oc(const CMat& z_s, const CMat& z_t, const CMat& z_r,
                                const CMat& z_l, const CMat& h_oc, double z_ref);

// Rank-one line-of-sight channel: (c / (4 pi f d)) * gain * ones.
CMat friis_los_channel(double f_hz, double distance_m, double gain, std::size_t n_r = 2,
                       std::size_t n_t = 2);

// Continuous-frequency noise PSD covariance at the LNA outputs:
//   k_b T beta^2 Z_0 (I - S_R^H S_R) + 4 beta^2 k_b T (N_f - 1) R_in I.
CMat noise_covariance_scattering(const CMat& s_r, const RfChain& chain);

// Impedance description of the same quantity:
//   4 k_b T beta^2 Z_L (Z_R+Z_L)^-1 Re{Z_R} (Z_R+Z_L)^-H Z_L^H
//     + 4 k_b T beta^2 (N_f - 1) R_in I.
CMat noise_covariance_impedance(const CMat& z_r, const CMat& z_l, const RfChain& chain);

// Discrete-time scalings of the continuous covariance.
CMat discrete_noise_sc(const CMat& rn_continuous, const RfChain& chain);  // B * R_n(f_c)
CMat discrete_noise_ofdm(const CMat& rn_continuous, const RfChain& chain,
                         std::size_t n_subcarriers);  // (B/K) * R_n(f_k)

// Kronecker covariance of vec(H) and vec(H_eff) plus the front transform
// T = F^T kron Q with R_Heff = T R_H T^H.
struct VecCovariances {
    CMat r_h;
    CMat r_heff;
    CMat t;
};
VecCovariances vec_covariances(const CMat& f, const CMat& q, const CMat& rt_half,
                               const CMat& rr_half);

// Extended Friis large-scale gain (c/(4 pi f d_ref))^2 (d_ref/d)^alpha.
double large_scale_rho(double f_hz, double d_m, double d_ref_m, double alpha);

}  // namespace mpmimo
