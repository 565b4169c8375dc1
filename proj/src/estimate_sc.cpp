#include "mpmimo/estimate_sc.hpp"

#include <cmath>
#include <utility>

#include "mpmimo/errors.hpp"
#include "mpmimo/linalg.hpp"
#include "mpmimo/rng.hpp"

namespace mpmimo {

void PilotBlock::validate() const {
    if (X.rows() == 0 || X.cols() == 0) throw DimensionMismatch("pilot block is empty");
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) {
            const cd x = X(i, j);
            if (x.imag() != 0.0 || std::abs(std::abs(x.real()) - 1.0) != 0.0)
                throw Error("pilot entries must be +/-1");
        }
}

PilotBlock bpsk_pilots(std::size_t n_t, std::size_t n_p, std::uint64_t seed) {
    if (n_t == 0 || n_p == 0) throw DimensionMismatch("pilot block is empty");
    Rng rng(seed);
    CMat x(n_t, n_p);
    for (std::size_t i = 0; i < n_t; ++i)
        for (std::size_t j = 0; j < n_p; ++j) x(i, j) = cd(rng.bpsk(), 0.0);
    return PilotBlock{std::move(x)};
}

PilotBlock orthogonal_pilots(std::size_t n_t, std::size_t n_p) {
    if (n_t == 0) throw DimensionMismatch("pilot block is empty");
    if (n_p < n_t || (n_p & (n_p - 1)) != 0)
        throw DimensionMismatch("orthogonal pilots need a power-of-two count >= n_t");
    // Sylvester recursion H_{2n} = [[H, H], [H, -H]] starting from [1].
    CMat h(1, 1, {cd(1.0, 0.0)});
    for (std::size_t n = 1; n < n_p; n *= 2) {
        CMat next(2 * n, 2 * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                next(i, j) = h(i, j);
                next(i, j + n) = h(i, j);
                next(i + n, j) = h(i, j);
                next(i + n, j + n) = -h(i, j);
            }
        h = std::move(next);
    }
    CMat x(n_t, n_p);
    for (std::size_t i = 0; i < n_t; ++i)
        for (std::size_t j = 0; j < n_p; ++j) x(i, j) = h(i, j);
    return PilotBlock{std::move(x)};
}

std::pair<CMat, CMat> stack_observations(const CMat& y, const PilotBlock& pilots) {
    if (y.cols() != pilots.n_pilots())
        throw DimensionMismatch("observation block and pilot block disagree on slot count");
    return {vec(y), kron(transpose(pilots.X), CMat::identity(y.rows()))};
}

std::pair<double, double> mismatch_constants(const CMat& r_heff, const RfChain& chain) {
    chain.validate();
    if (r_heff.rows() != r_heff.cols()) throw DimensionMismatch("covariance must be square");
    const double c1 = chain.bandwidth * kBoltzmann * chain.temperature * chain.beta *
                      chain.beta *
                      (chain.z_ref + 4.0 * (chain.noise_figure - 1.0) * chain.r_in);
    const double c2 = trace(r_heff).real() / static_cast<double>(r_heff.rows());
    return {c1, c2};
}

ScEstimate ab_estimate(const CMat& y_tilde, const CMat& a, double rho, double c1, double c2) {
    if (y_tilde.cols() != 1 || y_tilde.rows() != a.rows())
        throw DimensionMismatch("stacked observation does not match the pilot operator");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");
    // (c1 I + rho c2 A^H A) w = A^H y, estimate = sqrt(rho) c2 w.
    CMat gram = adjoint(a) * a;
    gram *= cd(rho * c2, 0.0);
    gram += cd(c1, 0.0) * CMat::identity(a.cols());
    const CMat w = hermitian_solve(hermitian_part(gram), adjoint(a) * y_tilde);
    ScEstimate out;
    out.vec_h_eff_hat = std::sqrt(rho) * c2 * w;
    out.method = EstimatorKind::AntennaBlind;
    return out;
}

CMat mismatched_mse_matrix(const CMat& a, double rho, const CMat& r_assumed,
                           const CMat& rn_assumed, const CMat& r_true, const CMat& rn_true) {
    if (r_assumed.rows() != a.cols() || r_true.rows() != a.cols())
        throw DimensionMismatch("channel covariance must match the operator column count");
    if (rn_assumed.rows() != a.rows() || rn_true.rows() != a.rows())
        throw DimensionMismatch("noise covariance must match the operator row count");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");
    const double sr = std::sqrt(rho);

    // Filter from the assumed covariances.
    const CMat ar_a = a * r_assumed;
    const CMat sy_a = hermitian_part(rn_assumed + rho * (ar_a * adjoint(a)));
    const CMat w = sr * hermitian_solve(sy_a, ar_a);

    // Error covariance under the true ones.
    const CMat ar_t = a * r_true;
    const CMat cross = sr * (adjoint(ar_t) * w);  // R_t A^H W
    const CMat mid = rn_true + rho * (ar_t * adjoint(a));
    const CMat e = r_true - cross - adjoint(cross) + adjoint(w) * (mid * w);
    return hermitian_part(e);
}

CMat ab_mse_matrix(const CMat& a, double rho, double c1, double c2, const CMat& r_heff_true,
                   const CMat& rn_true) {
    if (rn_true.rows() != rn_true.cols() || rn_true.rows() == 0 ||
        a.rows() % rn_true.rows() != 0)
        throw DimensionMismatch("per-sample noise covariance does not tile the observation");
    const std::size_t n_p = a.rows() / rn_true.rows();
    const CMat r_assumed = c2 * CMat::identity(a.cols());
    const CMat rn_assumed = c1 * CMat::identity(a.rows());
    const CMat rn_block = kron(CMat::identity(n_p), rn_true);
    return mismatched_mse_matrix(a, rho, r_assumed, rn_assumed, r_heff_true, rn_block);
}

CMat aa_whitened_operator(const PilotBlock& pilots, const LinkModel& model) {
    if (model.F.rows() != pilots.n_tx())
        throw DimensionMismatch("pilot rows must match the transmit front");
    const CMat l = cholesky_lower(model.R_n);
    return kron(transpose(model.F * pilots.X), solve(l, model.Q));
}

ScEstimate aa_estimate(const CMat& y, const PilotBlock& pilots, const LinkModel& model,
                       double rho) {
    if (y.rows() != model.Q.rows() || y.cols() != pilots.n_pilots())
        throw DimensionMismatch("observation block does not match the link model");
    if (!(rho > 0.0)) throw Error("large-scale gain must be positive");
    const CMat l = cholesky_lower(model.R_n);
    const CMat y_prime = solve(l, y);
    const CMat a_prime = aa_whitened_operator(pilots, model);
    const VecCovariances cov =
        vec_covariances(model.F, model.Q, model.Rt_half, model.Rr_half);

    // vec(H_hat) = sqrt(rho) R_H A'^H (I + rho A' R_H A'^H)^-1 vec(Y').
    const CMat ra = cov.r_h * adjoint(a_prime);
    const CMat sy = hermitian_part(CMat::identity(a_prime.rows()) + rho * (a_prime * ra));
    const CMat u = hermitian_solve(sy, vec(y_prime));
    ScEstimate out;
    out.vec_h_hat = std::sqrt(rho) * (ra * u);
    out.vec_h_eff_hat = cov.t * out.vec_h_hat;
    out.method = EstimatorKind::AntennaAware;
    return out;
}

AaMse aa_mse_matrices(const CMat& a_prime, double rho, const CMat& r_h, const CMat& t) {
    if (r_h.rows() != a_prime.cols())
        throw DimensionMismatch("channel covariance must match the operator column count");
    const CMat ar = a_prime * r_h;
    const CMat sy = hermitian_part(CMat::identity(a_prime.rows()) + rho * (ar * adjoint(a_prime)));
    const CMat x = hermitian_solve(sy, ar);
    AaMse out;
    out.e_h = hermitian_part(r_h - rho * (adjoint(ar) * x));
    out.e_heff = hermitian_part(t * out.e_h * adjoint(t));
    return out;
}

}  // namespace mpmimo
