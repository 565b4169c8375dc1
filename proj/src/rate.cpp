#include "mpmimo/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpmimo/errors.hpp"

namespace mpmimo {

namespace {

double total_power(const std::vector<double>& gains, double mu) {
    double sum = 0.0;
    for (const double g : gains)
        if (g > 0.0) sum += std::max(0.0, mu - 1.0 / g);
    return sum;
}

// One subcarrier's worth of precoding state: estimated gains for the
// water-filler plus the cross-stream couplings of the true channel seen
// through the estimated beamformers.
struct StreamCouplings {
    std::vector<double> gains;  // scale * sigma_hat_j^2
    CMat cross;                 // cross(j, l) = |u_j^H G_true v_l|^2 (stored real)
    double scale = 0.0;         // rho * p_t / n_t
};

StreamCouplings couple_streams(const CMat& h_true, const CMat& h_hat, const CMat& r_n,
                               double rho, double p_t) {
    if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols())
        throw DimensionMismatch("true and estimated channels must agree in shape");
    if (r_n.rows() != h_true.rows() || !r_n.square())
        throw DimensionMismatch("noise covariance must be square with the receive dimension");
    const std::size_t n_r = h_true.rows(), n_t = h_true.cols();
    const std::size_t n_s = std::min(n_r, n_t);

    const CMat l = cholesky_lower(r_n);
    const CMat g_true = solve(l, h_true);
    const SvdResult dec = svd(solve(l, h_hat));

    StreamCouplings sc;
    sc.scale = rho * p_t / static_cast<double>(n_t);
    sc.gains.resize(n_s);
    for (std::size_t j = 0; j < n_s; ++j) sc.gains[j] = sc.scale * dec.s[j] * dec.s[j];

    // Project the true whitened channel onto the estimate's singular bases:
    // cross = U^H G V restricted to the leading n_s streams.
    const CMat proj = adjoint(dec.u) * (g_true * dec.v);
    sc.cross = CMat(n_s, n_s);
    for (std::size_t j = 0; j < n_s; ++j)
        for (std::size_t lidx = 0; lidx < n_s; ++lidx)
            sc.cross(j, lidx) = cd(std::norm(proj(j, lidx)), 0.0);
    return sc;
}

// Per-stream SINR of one subcarrier under a given power split, leakage from
// the other streams of the same subcarrier counted as noise.
std::vector<double> stream_sinrs(const StreamCouplings& sc, const double* powers) {
    const std::size_t n_s = sc.gains.size();
    std::vector<double> sinr(n_s);
    for (std::size_t j = 0; j < n_s; ++j) {
        double leak = 0.0;
        for (std::size_t l = 0; l < n_s; ++l)
            if (l != j) leak += powers[l] * sc.cross(j, l).real();
        sinr[j] = sc.scale * powers[j] * sc.cross(j, j).real() / (1.0 + sc.scale * leak);
    }
    return sinr;
}

}  // namespace

PowerAllocation waterfill(const std::vector<double>& gains, double budget) {
    if (!(budget > 0.0)) throw Error("power budget must be positive");
    double max_inv = 0.0;
    bool any = false;
    for (const double g : gains) {
        if (g < 0.0) throw Error("channel gains must be nonnegative");
        if (g > 0.0) {
            any = true;
            max_inv = std::max(max_inv, 1.0 / g);
        }
    }
    if (!any) throw AllZeroGains("water-filling has no stream to feed");

    // Bisection on the water level: total power is continuous and
    // nondecreasing in mu, zero at mu = 0 and at least the budget at the
    // upper end.
    double lo = 0.0, hi = budget + max_inv;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (total_power(gains, mid) < budget) lo = mid;
        else hi = mid;
        if (std::abs(total_power(gains, mid) - budget) < 1e-10 && hi - lo < 1e-12 * hi) break;
    }
    double mu = 0.5 * (lo + hi);

    // The bisection has pinned the active set; one exact step makes the
    // budget residual vanish up to rounding.
    double inv_sum = 0.0;
    std::size_t active = 0;
    for (const double g : gains)
        if (g > 0.0 && mu - 1.0 / g > 0.0) {
            inv_sum += 1.0 / g;
            ++active;
        }
    if (active > 0) mu = (budget + inv_sum) / static_cast<double>(active);

    PowerAllocation alloc;
    alloc.budget = budget;
    alloc.water_level = mu;
    alloc.powers.resize(gains.size());
    for (std::size_t j = 0; j < gains.size(); ++j)
        alloc.powers[j] = gains[j] > 0.0 ? std::max(0.0, mu - 1.0 / gains[j]) : 0.0;
    return alloc;
}

RateReport sc_rate_lower_bound(const CMat& h_eff_true, const CMat& h_eff_hat, const CMat& r_n,
                               double rho, double p_t) {
    const StreamCouplings sc = couple_streams(h_eff_true, h_eff_hat, r_n, rho, p_t);
    const std::size_t n_t = h_eff_true.cols();

    RateReport report;
    bool any = false;
    for (const double g : sc.gains) any = any || g > 0.0;
    if (!any) {
        // A zero estimate carries no usable direction; the bound degrades to
        // zero rather than an error.
        report.per_stream_sinr.assign(sc.gains.size(), 0.0);
        return report;
    }

    const PowerAllocation alloc = waterfill(sc.gains, static_cast<double>(n_t));
    report.per_stream_sinr = stream_sinrs(sc, alloc.powers.data());
    for (const double s : report.per_stream_sinr) report.rate_bpcu += std::log2(1.0 + s);
    return report;
}

RateReport ofdm_rate_lower_bound(const std::vector<CMat>& h_eff_true,
                                 const std::vector<CMat>& h_eff_hat,
                                 const std::vector<CMat>& r_n, const std::vector<double>& rho,
                                 double p_t) {
    const std::size_t k_sub = h_eff_true.size();
    if (k_sub == 0) throw DimensionMismatch("need at least one subcarrier");
    if (h_eff_hat.size() != k_sub || r_n.size() != k_sub || rho.size() != k_sub)
        throw DimensionMismatch("per-subcarrier inputs must have one entry per subcarrier");
    const std::size_t n_t = h_eff_true[0].cols();

    std::vector<StreamCouplings> per_k;
    std::vector<double> all_gains;
    per_k.reserve(k_sub);
    for (std::size_t k = 0; k < k_sub; ++k) {
        if (h_eff_true[k].cols() != n_t)
            throw DimensionMismatch("subcarriers must share the transmit dimension");
        per_k.push_back(couple_streams(h_eff_true[k], h_eff_hat[k], r_n[k], rho[k], p_t));
        all_gains.insert(all_gains.end(), per_k.back().gains.begin(), per_k.back().gains.end());
    }

    RateReport report;
    report.per_subcarrier_power.assign(k_sub, 0.0);
    bool any = false;
    for (const double g : all_gains) any = any || g > 0.0;
    if (!any) {
        report.per_stream_sinr.assign(all_gains.size(), 0.0);
        return report;
    }

    // One pool of power for every (subcarrier, stream) pair.
    const PowerAllocation alloc =
        waterfill(all_gains, static_cast<double>(k_sub) * static_cast<double>(n_t));

    std::size_t offset = 0;
    for (std::size_t k = 0; k < k_sub; ++k) {
        const std::vector<double> sinr = stream_sinrs(per_k[k], alloc.powers.data() + offset);
        for (std::size_t j = 0; j < sinr.size(); ++j) {
            report.per_stream_sinr.push_back(sinr[j]);
            report.per_subcarrier_power[k] += alloc.powers[offset + j];
            report.rate_bpcu += std::log2(1.0 + sinr[j]);
        }
        offset += sinr.size();
    }
    report.rate_bpcu /= static_cast<double>(k_sub);
    return report;
}

}  // namespace mpmimo
