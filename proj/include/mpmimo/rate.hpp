#pragma once

// Achievable-rate evaluation from (possibly imperfect) channel estimates.
// The transmitter precodes along the SVD of the *estimated* whitened channel
// while the data travels through the true one, so residual cross-stream
// leakage is treated as extra noise. Power is spread by water-filling, per
// channel use in the single-carrier case and jointly over space and
// frequency in the multicarrier case.

#include <cstddef>
#include <vector>

#include "mpmimo/linalg.hpp"

namespace mpmimo {

// Water-filling solution: powers sum to the budget and active streams share
// a common level, powers[j] = water_level - 1/gains[j].
struct PowerAllocation {
    std::vector<double> powers;
    double budget = 0.0;
    double water_level = 0.0;
};

// Rate summary in bits per channel use (per subcarrier for multicarrier).
// per_subcarrier_power is only filled by the multicarrier bound.
struct RateReport {
    double rate_bpcu = 0.0;
    std::vector<double> per_stream_sinr;
    std::vector<double> per_subcarrier_power;
};

// Maximizes sum log2(1 + gains[j] * P_j) subject to sum P_j = budget and
// P_j >= 0. Streams with zero gain get no power; throws AllZeroGains when
// no stream is worth feeding and Error for a non-positive budget.
PowerAllocation waterfill(const std::vector<double>& gains, double budget);

// Mutual-information lower bound for one carrier. The receive chain whitens
// with the Cholesky factor of r_n; beamformers come from the SVD of the
// whitened estimate; stream powers water-fill the estimated gains under a
// total budget of n_t; the SINR of each stream measures the true channel
// through those beamformers with inter-stream leakage in the denominator.
RateReport sc_rate_lower_bound(const CMat& h_eff_true, const CMat& h_eff_hat, const CMat& r_n,
                               double rho, double p_t);

// Multicarrier counterpart: per-subcarrier whitening and SVD, one joint
// water-filling across all K * min(n_r, n_t) estimated gains with budget
// K * n_t, and the final rate normalized by the number of subcarriers.
RateReport ofdm_rate_lower_bound(const std::vector<CMat>& h_eff_true,
                                 const std::vector<CMat>& h_eff_hat,
                                 const std::vector<CMat>& r_n, const std::vector<double>& rho,
                                 double p_t);

}  // namespace mpmimo
