#pragma once

#include <cstdint>
#include <utility>

#include "mpmimo/channel.hpp"
#include "mpmimo/mat.hpp"

namespace mpmimo {

// Pilot symbols sent over N_p channel uses: an N_t x N_p matrix whose
// entries are all +/-1.
struct PilotBlock {
    CMat X;

    std::size_t n_tx() const { return X.rows(); }
    std::size_t n_pilots() const { return X.cols(); }
    void validate() const;  // throws Error unless every entry is +/-1
};

// i.i.d. equiprobable +/-1 pilots, reproducible per seed.
PilotBlock bpsk_pilots(std::size_t n_t, std::size_t n_p, std::uint64_t seed);

// First n_t rows of the n_p-point Sylvester-Hadamard matrix, so that
// X X^H = n_p I while keeping +/-1 entries. Requires n_p a power of two
// with n_p >= n_t. Handy wherever a test needs an exactly invertible
// pilot Gram matrix.
PilotBlock orthogonal_pilots(std::size_t n_t, std::size_t n_p);

// "Blind" ignores the coupling model and works with scalar covariance
// guesses; "aware" whitens the noise and uses the true covariances.
enum class EstimatorKind { AntennaBlind, AntennaAware };

struct ScEstimate {
    CMat vec_h_eff_hat;  // N_r N_t x 1 estimate of vec(H_eff)
    CMat vec_h_hat;      // propagation-domain estimate; empty for the blind path
    EstimatorKind method = EstimatorKind::AntennaBlind;
};

// Vectorize the receive block and build the pilot operator:
//   y_tilde = vec(Y),  A = X^T kron I_{N_r},
// so that y_tilde = sqrt(rho) A vec(H_eff) + vec(N).
std::pair<CMat, CMat> stack_observations(const CMat& y, const PilotBlock& pilots);

// Scalars the blind estimator substitutes for the covariances it cannot see:
//   c1 = B k_b T beta^2 (Z_0 + 4 (N_f - 1) R_in)   matched-array noise power
//   c2 = tr(R_Heff) / (N_r N_t)                    mean channel-entry power
std::pair<double, double> mismatch_constants(const CMat& r_heff, const RfChain& chain);

// W_AB = sqrt(rho) (c1 I + rho c2 A A^H)^-1 A c2; estimate = W_AB^H y_tilde.
// Evaluated through the Gram form (c1 I + rho c2 A^H A)^-1 A^H y_tilde,
// which is algebraically identical and keeps the solve at N_r N_t order.
ScEstimate ab_estimate(const CMat& y_tilde, const CMat& a, double rho, double c1, double c2);

// Error covariance of a linear estimator whose filter is built from assumed
// covariances while the data follow different (true) ones:
//   W = sqrt(rho) (Rn_a + rho A R_a A^H)^-1 A R_a
//   E = R_t - sqrt(rho) R_t A^H W - sqrt(rho) W^H A R_t
//       + W^H (Rn_t + rho A R_t A^H) W
// Noise covariances are the full stacked (N_r N_p square) matrices. With
// assumed == true this is the familiar matched LMMSE error covariance.
CMat mismatched_mse_matrix(const CMat& a, double rho, const CMat& r_assumed,
                           const CMat& rn_assumed, const CMat& r_true, const CMat& rn_true);

// Blind-estimator MSE: scalar covariances c1 I / c2 I inside the filter,
// true covariances (r_heff_true, I_{N_p} kron rn_true) in the expectation.
// rn_true is the per-sample N_r x N_r discrete noise covariance.
CMat ab_mse_matrix(const CMat& a, double rho, double c1, double c2, const CMat& r_heff_true,
                   const CMat& rn_true);

// The whitened pilot operator the aware estimator works with:
//   A' = (F X)^T kron (L^-1 Q),  L = chol(R_n).
CMat aa_whitened_operator(const PilotBlock& pilots, const LinkModel& model);

// Aware estimator: whiten the observations with the noise Cholesky factor,
// estimate the propagation channel under its Kronecker covariance, then map
// through T = F^T kron Q:
//   Y' = L^-1 Y
//   W_AA = sqrt(rho) (I + rho A' R_H A'^H)^-1 A' R_H
//   vec(H_hat) = W_AA^H vec(Y'),  vec(H_eff_hat) = T vec(H_hat)
ScEstimate aa_estimate(const CMat& y, const PilotBlock& pilots, const LinkModel& model,
                       double rho);

struct AaMse {
    CMat e_h;     // error covariance of vec(H_hat)
    CMat e_heff;  // T E T^H, error covariance of vec(H_eff_hat)
};

// E_AA = R_H - rho R_H A'^H (I + rho A' R_H A'^H)^-1 A' R_H.
AaMse aa_mse_matrices(const CMat& a_prime, double rho, const CMat& r_h, const CMat& t);

}  // namespace mpmimo
