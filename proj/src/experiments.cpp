#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>

#include <json.hpp>

#include "mpmimo/errors.hpp"
#include "mpmimo/estimate_mc.hpp"
#include "mpmimo/estimate_sc.hpp"
#include "mpmimo/experiments.hpp"
#include "mpmimo/netparams.hpp"
#include "mpmimo/rate.hpp"
#include "mpmimo/rng.hpp"

namespace mpmimo {

namespace {

// Frequency-resolved scattering data for both link ends.
struct ArrayCache {
    NetworkParams tx, rx;  // empty (n_ports 0) for the dipole source
};

ArrayCache load_arrays(const ExperimentConfig& cfg) {
    ArrayCache cache;
    if (cfg.array.kind == ArrayKind::Synthetic) {
        std::vector<double> pts;
        const std::size_t n_pts = 65;
        for (std::size_t i = 0; i < n_pts; ++i)
            pts.push_back(cfg.array.f_lo + (cfg.array.f_hi - cfg.array.f_lo) *
                                               static_cast<double>(i) /
                                               static_cast<double>(n_pts - 1));
        const FrequencyGrid grid(pts);
        cache.tx = synth_coupled_array(cfg.array.ports, cfg.array.coupling,
                                       cfg.array.selectivity, grid, kSynthShapeSeedTx);
        cache.rx = synth_coupled_array(cfg.array.ports, cfg.array.coupling,
                                       cfg.array.selectivity, grid, kSynthShapeSeedRx);
    } else if (cfg.array.kind == ArrayKind::Touchstone) {
        NetworkParams p = parse_touchstone_file(cfg.array.path);
        if (p.kind == ParamKind::Impedance) {
            for (CMat& m : p.matrices) m = z_to_s(m, cfg.chain.z_ref);
            p.kind = ParamKind::Scattering;
        }
        cache.tx = p;
        cache.rx = std::move(p);
    }
    return cache;
}

// Scattering matrices of both ends at one frequency.
std::pair<CMat, CMat> arrays_at(const ExperimentConfig& cfg, const ArrayCache& cache,
                                double f_hz) {
    if (cfg.array.kind == ArrayKind::Dipole) {
        const CMat s = z_to_s(dipole_pair_impedance(f_hz, cfg.array.spacing, cfg.array.length),
                              cfg.chain.z_ref);
        return {s, s};
    }
    return {interpolate(cache.tx, f_hz), interpolate(cache.rx, f_hz)};
}

// Everything the single-carrier estimators need at one frequency.
struct ScParts {
    std::size_t n = 0;
    CMat f_front, q_front, rt, rr, r_n, l_n;
    VecCovariances cov;
    double c1c = 0.0, c2c = 0.0;
};

ScParts sc_parts(const ExperimentConfig& cfg, const ArrayCache& cache, double f_hz) {
    const auto [s_t, s_r] = arrays_at(cfg, cache, f_hz);
    ScParts p;
    p.n = s_t.rows();
    std::tie(p.f_front, p.q_front) = front_matrices(s_t, s_r, cfg.chain.beta);
    std::tie(p.rt, p.rr) = spatial_correlation_halves(s_t, s_r);
    p.r_n = discrete_noise_sc(noise_covariance_scattering(s_r, cfg.chain), cfg.chain);
    p.l_n = cholesky_lower(p.r_n);
    p.cov = vec_covariances(p.f_front, p.q_front, p.rt, p.rr);
    std::tie(p.c1c, p.c2c) = mismatch_constants(p.cov.r_heff, cfg.chain);
    return p;
}

// Everything the multicarrier estimators need. The system bandwidth for the
// multicarrier scenarios comes from the [ofdm] band edges, overriding the
// single-carrier [chain].bandwidth.
struct McParts {
    OfdmConfig ocfg;  // window length = taps_true
    RfChain chain;
    SubcarrierFronts fronts;
    std::vector<CMat> rn_k, chol_k;
    CMat pilots;
    McStacking st_true;
    McConstants cons;
};

McParts mc_parts(const ExperimentConfig& cfg, const ArrayCache& cache) {
    McParts p;
    p.chain = cfg.chain;
    p.chain.bandwidth = cfg.ofdm.f_hi - cfg.ofdm.f_lo;
    const std::size_t n = cfg.array.ports;
    p.ocfg = OfdmConfig::uniform(cfg.ofdm.subcarriers, cfg.ofdm.taps_true,
                                 cfg.ofdm.time_slots, cfg.ofdm.f_lo, p.chain.bandwidth, n, n);
    std::vector<CMat> s_t, s_r;
    for (const double f : p.ocfg.f_k) {
        auto [st_k, sr_k] = arrays_at(cfg, cache, f);
        s_t.push_back(std::move(st_k));
        s_r.push_back(std::move(sr_k));
    }
    p.fronts = per_subcarrier_fronts(s_t, s_r, p.chain.beta);
    for (std::size_t k = 0; k < p.ocfg.K; ++k) {
        p.rn_k.push_back(discrete_noise_ofdm(noise_covariance_scattering(s_r[k], p.chain),
                                             p.chain, p.ocfg.K));
        p.chol_k.push_back(cholesky_lower(p.rn_k.back()));
    }
    p.pilots = bpsk_pilots(n, p.ocfg.K * p.ocfg.L_t, derive_seed(cfg.seed, kPilotSeedTag)).X;
    p.st_true = build_stacking(p.ocfg, p.pilots, p.fronts, p.chol_k);
    p.cons = freq_covariance_and_constants(p.st_true.c1, p.ocfg, p.chain);
    return p;
}

// Exact per-subcarrier effective channels of one tap realization.
std::vector<CMat> effective_subcarriers(const McParts& p, const TapChannel& taps) {
    const std::vector<CMat> freq = taps_to_freq(taps, p.ocfg.K);
    std::vector<CMat> eff;
    eff.reserve(p.ocfg.K);
    for (std::size_t k = 0; k < p.ocfg.K; ++k)
        eff.push_back(p.fronts.q[k] * freq[k] * p.fronts.f[k]);
    return eff;
}

CMat stack_subcarriers(const std::vector<CMat>& eff) {
    const std::size_t block = eff[0].rows() * eff[0].cols();
    CMat out(eff.size() * block, 1);
    for (std::size_t k = 0; k < eff.size(); ++k) {
        const CMat v = vec(eff[k]);
        for (std::size_t i = 0; i < block; ++i) out(k * block + i, 0) = v(i, 0);
    }
    return out;
}

// Stacked pilot observation, subcarrier-fastest row order.
CMat draw_mc_observation(const McParts& p, const std::vector<CMat>& eff, double rho,
                         Rng& rng) {
    const std::size_t n_r = p.ocfg.n_r, n_t = p.ocfg.n_t;
    CMat y(p.ocfg.K * p.ocfg.L_t * n_r, 1);
    for (std::size_t t = 0; t < p.ocfg.L_t; ++t)
        for (std::size_t k = 0; k < p.ocfg.K; ++k) {
            CMat x(n_t, 1);
            for (std::size_t j = 0; j < n_t; ++j) x(j, 0) = p.pilots(j, t * p.ocfg.K + k);
            CMat w(n_r, 1);
            for (std::size_t i = 0; i < n_r; ++i) w(i, 0) = rng.cnormal();
            const CMat block = std::sqrt(rho) * (eff[k] * x) + p.chol_k[k] * w;
            for (std::size_t i = 0; i < n_r; ++i)
                y((t * p.ocfg.K + k) * n_r + i, 0) = block(i, 0);
        }
    return y;
}

CMat whiten_mc(const McParts& p, const CMat& y) {
    const std::size_t n_r = p.ocfg.n_r;
    CMat out(y.rows(), 1);
    for (std::size_t t = 0; t < p.ocfg.L_t; ++t)
        for (std::size_t k = 0; k < p.ocfg.K; ++k) {
            CMat block(n_r, 1);
            for (std::size_t i = 0; i < n_r; ++i)
                block(i, 0) = y((t * p.ocfg.K + k) * n_r + i, 0);
            const CMat wb = solve(p.chol_k[k], block);
            for (std::size_t i = 0; i < n_r; ++i) out((t * p.ocfg.K + k) * n_r + i, 0) = wb(i, 0);
        }
    return out;
}

// Per-subcarrier matrices from a stacked frequency-domain vec.
std::vector<CMat> unstack_subcarriers(const CMat& v, std::size_t k_sub, std::size_t n_r,
                                      std::size_t n_t) {
    std::vector<CMat> out;
    const std::size_t block = n_r * n_t;
    for (std::size_t k = 0; k < k_sub; ++k) {
        CMat slice(block, 1);
        for (std::size_t i = 0; i < block; ++i) slice(i, 0) = v(k * block + i, 0);
        out.push_back(unvec(slice, n_r, n_t));
    }
    return out;
}

// Runs body(t) for t in [0, trials) across a worker pool. Results must go
// into per-trial slots: the caller reduces them in index order afterwards,
// which keeps the output independent of the scheduling.
void for_trials(std::size_t trials, std::size_t threads,
                const std::function<void(std::size_t)>& body) {
    threads = std::max<std::size_t>(1, std::min(threads, trials));
    if (threads == 1) {
        for (std::size_t t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t t = next.fetch_add(1);
                if (t >= trials) return;
                try {
                    body(t);
                } catch (...) {
                    std::lock_guard<std::mutex> guard(error_lock);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double sq_norm(const CMat& m) {
    const double f = fro_norm(m);
    return f * f;
}

// Single-carrier estimate pair for one trial.
struct ScTrial {
    double err_ab, err_aa, power;
    CMat h_true, h_ab, h_aa;
};

ScTrial sc_trial(const ScParts& p, const PilotBlock& pilots,
                 double rho, double f_hz, std::uint64_t seed) {
    const ChannelRealization ch =
        draw_channel(p.rt, p.rr, p.f_front, p.q_front, derive_seed(seed, 0));
    Rng noise(derive_seed(seed, 1));
    CMat w(p.n, pilots.n_pilots());
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < pilots.n_pilots(); ++j) w(i, j) = noise.cnormal();
    const CMat y = std::sqrt(rho) * (ch.H_eff * pilots.X) + p.l_n * w;

    const auto [y_tilde, a] = stack_observations(y, pilots);
    const LinkModel model{f_hz, p.f_front, p.q_front, p.rt, p.rr, p.r_n, rho};
    ScTrial out;
    out.h_true = ch.H_eff;
    out.h_ab = unvec(ab_estimate(y_tilde, a, rho, p.c1c, p.c2c).vec_h_eff_hat, p.n, p.n);
    out.h_aa = unvec(aa_estimate(y, pilots, model, rho).vec_h_eff_hat, p.n, p.n);
    out.err_ab = sq_norm(out.h_ab - ch.H_eff);
    out.err_aa = sq_norm(out.h_aa - ch.H_eff);
    out.power = sq_norm(ch.H_eff);
    return out;
}

SweepResult result_shell(const ExperimentConfig& cfg, const std::string& axis_name,
                         const std::string& unit, std::vector<std::string> methods) {
    SweepResult r;
    r.axis_name = axis_name;
    r.axis = cfg.grid;
    r.methods = std::move(methods);
    r.series.assign(r.methods.size(), std::vector<double>());
    r.unit = unit;
    r.config_hash = config_hash(cfg);
    r.trials = cfg.trials;
    return r;
}

SweepResult sweep_sc_nmse(const ExperimentConfig& cfg, std::size_t threads, bool power_axis) {
    const ArrayCache cache = load_arrays(cfg);
    SweepResult res = result_shell(cfg, power_axis ? "power_dbm" : "frequency_hz", "nmse",
                                   {"ab", "aa"});
    ScParts fixed;
    if (power_axis) fixed = sc_parts(cfg, cache, cfg.carrier);
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const double f_hz = power_axis ? cfg.carrier : cfg.grid[i];
        const ScParts& p = power_axis ? fixed : (fixed = sc_parts(cfg, cache, f_hz), fixed);
        const PilotBlock pilots = bpsk_pilots(p.n, cfg.pilots, derive_seed(cfg.seed, kPilotSeedTag));
        const double watts = dbm_to_watts(power_axis ? cfg.grid[i] : cfg.power_dbm);
        const double rho =
            large_scale_rho(f_hz, cfg.geometry.distance, cfg.geometry.d_ref,
                            cfg.geometry.alpha) *
            watts;
        const std::uint64_t base = derive_seed(cfg.seed, kPointSeedBase + i);
        std::vector<double> err_ab(cfg.trials), err_aa(cfg.trials), pow(cfg.trials);
        for_trials(cfg.trials, threads, [&](std::size_t t) {
            const ScTrial tr = sc_trial(p, pilots, rho, f_hz, derive_seed(base, t));
            err_ab[t] = tr.err_ab;
            err_aa[t] = tr.err_aa;
            pow[t] = tr.power;
        });
        double se_ab = 0.0, se_aa = 0.0, sp = 0.0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            se_ab += err_ab[t];
            se_aa += err_aa[t];
            sp += pow[t];
        }
        res.series[0].push_back(se_ab / sp);
        res.series[1].push_back(se_aa / sp);
    }
    return res;
}

SweepResult sweep_sc_rate(const ExperimentConfig& cfg, std::size_t threads, bool power_axis) {
    const ArrayCache cache = load_arrays(cfg);
    SweepResult res = result_shell(cfg, power_axis ? "power_dbm" : "frequency_hz", "bpcu",
                                   {"perfect", "aa", "ab"});
    ScParts fixed;
    if (power_axis) fixed = sc_parts(cfg, cache, cfg.carrier);
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const double f_hz = power_axis ? cfg.carrier : cfg.grid[i];
        const ScParts& p = power_axis ? fixed : (fixed = sc_parts(cfg, cache, f_hz), fixed);
        const PilotBlock pilots = bpsk_pilots(p.n, cfg.pilots, derive_seed(cfg.seed, kPilotSeedTag));
        const double watts = dbm_to_watts(power_axis ? cfg.grid[i] : cfg.power_dbm);
        const double rho =
            large_scale_rho(f_hz, cfg.geometry.distance, cfg.geometry.d_ref,
                            cfg.geometry.alpha) *
            watts;
        const std::uint64_t base = derive_seed(cfg.seed, kPointSeedBase + i);
        std::vector<double> r_perfect(cfg.trials), r_aa(cfg.trials), r_ab(cfg.trials);
        for_trials(cfg.trials, threads, [&](std::size_t t) {
            const ScTrial tr = sc_trial(p, pilots, rho, f_hz, derive_seed(base, t));
            r_perfect[t] = sc_rate_lower_bound(tr.h_true, tr.h_true, p.r_n, rho, 1.0).rate_bpcu;
            r_aa[t] = sc_rate_lower_bound(tr.h_true, tr.h_aa, p.r_n, rho, 1.0).rate_bpcu;
            r_ab[t] = sc_rate_lower_bound(tr.h_true, tr.h_ab, p.r_n, rho, 1.0).rate_bpcu;
        });
        double sums[3] = {0.0, 0.0, 0.0};
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            sums[0] += r_perfect[t];
            sums[1] += r_aa[t];
            sums[2] += r_ab[t];
        }
        for (int m = 0; m < 3; ++m)
            res.series[m].push_back(sums[m] / static_cast<double>(cfg.trials));
    }
    return res;
}

SweepResult sweep_snr_freq(const ExperimentConfig& cfg, std::size_t threads) {
    (void)threads;  // empirical_snr runs its own fixed-order loop
    const ArrayCache cache = load_arrays(cfg);
    SweepResult res = result_shell(cfg, "frequency_hz", "ratio", {"snr"});
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const double f_hz = cfg.grid[i];
        const ScParts p = sc_parts(cfg, cache, f_hz);
        const double rho = large_scale_rho(f_hz, cfg.geometry.distance, cfg.geometry.d_ref,
                                           cfg.geometry.alpha) *
                           dbm_to_watts(cfg.power_dbm);
        const LinkModel model{f_hz, p.f_front, p.q_front, p.rt, p.rr, p.r_n, rho};
        res.series[0].push_back(
            empirical_snr(model, cfg.trials, derive_seed(cfg.seed, kPointSeedBase + i)));
    }
    return res;
}

SweepResult sweep_mc_taps(const ExperimentConfig& cfg, std::size_t threads) {
    const ArrayCache cache = load_arrays(cfg);
    const McParts p = mc_parts(cfg, cache);
    SweepResult res = result_shell(cfg, "assumed_taps", "nmse", {"ab", "aa"});
    const double f_c = 0.5 * (cfg.ofdm.f_lo + cfg.ofdm.f_hi);
    const double rho = large_scale_rho(f_c, cfg.geometry.distance, cfg.geometry.d_ref,
                                       cfg.geometry.alpha) *
                       dbm_to_watts(cfg.power_dbm);
    const std::size_t n = p.ocfg.n_t;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        OfdmConfig acfg = p.ocfg;
        acfg.L = static_cast<std::size_t>(cfg.grid[i]);
        const McStacking st_a = build_stacking(acfg, p.pilots, p.fronts, p.chol_k);
        const double c4_a = trace(p.cons.r_hs_eff).real() /
                            static_cast<double>(n * n * acfg.L);
        const std::uint64_t base = derive_seed(cfg.seed, kPointSeedBase + i);
        std::vector<double> err_ab(cfg.trials), err_aa(cfg.trials), pow(cfg.trials);
        for_trials(cfg.trials, threads, [&](std::size_t t) {
            const TapChannel taps =
                draw_taps(cfg.ofdm.taps_true, n, n, derive_seed(derive_seed(base, t), 0));
            const std::vector<CMat> eff = effective_subcarriers(p, taps);
            Rng noise(derive_seed(derive_seed(base, t), 1));
            const CMat y = draw_mc_observation(p, eff, rho, noise);
            const CMat truth = stack_subcarriers(eff);
            const CMat ab_freq =
                st_a.c2 * ab_estimate_ofdm(y, st_a.b_mat, rho, p.cons.c3, c4_a);
            const CMat aa_freq = aa_estimate_ofdm(whiten_mc(p, y), p.st_true, rho).vec_h_eff_freq;
            err_ab[t] = sq_norm(ab_freq - truth);
            err_aa[t] = sq_norm(aa_freq - truth);
            pow[t] = sq_norm(truth);
        });
        double se_ab = 0.0, se_aa = 0.0, sp = 0.0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            se_ab += err_ab[t];
            se_aa += err_aa[t];
            sp += pow[t];
        }
        res.series[0].push_back(se_ab / sp);
        res.series[1].push_back(se_aa / sp);
    }
    return res;
}

SweepResult sweep_mc_power_profile(const ExperimentConfig& cfg, std::size_t threads) {
    const ArrayCache cache = load_arrays(cfg);
    const McParts p = mc_parts(cfg, cache);
    SweepResult res = result_shell(cfg, "subcarrier", "power", {"perfect", "aa", "ab"});
    const double f_c = 0.5 * (cfg.ofdm.f_lo + cfg.ofdm.f_hi);
    const double rho = large_scale_rho(f_c, cfg.geometry.distance, cfg.geometry.d_ref,
                                       cfg.geometry.alpha) *
                       dbm_to_watts(cfg.power_dbm);
    const std::size_t n = p.ocfg.n_t, k_sub = p.ocfg.K;
    const std::vector<double> rho_k(k_sub, rho);

    OfdmConfig acfg = p.ocfg;
    acfg.L = cfg.ofdm.taps_assumed;
    const McStacking st_a = build_stacking(acfg, p.pilots, p.fronts, p.chol_k);
    const double c4_a =
        trace(p.cons.r_hs_eff).real() / static_cast<double>(n * n * acfg.L);

    const std::uint64_t base = derive_seed(cfg.seed, kPointSeedBase);
    std::vector<std::vector<double>> prof_perfect(cfg.trials), prof_aa(cfg.trials),
        prof_ab(cfg.trials);
    for_trials(cfg.trials, threads, [&](std::size_t t) {
        const TapChannel taps =
            draw_taps(cfg.ofdm.taps_true, n, n, derive_seed(derive_seed(base, t), 0));
        const std::vector<CMat> eff = effective_subcarriers(p, taps);
        Rng noise(derive_seed(derive_seed(base, t), 1));
        const CMat y = draw_mc_observation(p, eff, rho, noise);
        const std::vector<CMat> hat_ab = unstack_subcarriers(
            st_a.c2 * ab_estimate_ofdm(y, st_a.b_mat, rho, p.cons.c3, c4_a), k_sub, n, n);
        const std::vector<CMat> hat_aa = unstack_subcarriers(
            aa_estimate_ofdm(whiten_mc(p, y), p.st_true, rho).vec_h_eff_freq, k_sub, n, n);
        prof_perfect[t] = ofdm_rate_lower_bound(eff, eff, p.rn_k, rho_k, 1.0).per_subcarrier_power;
        prof_aa[t] = ofdm_rate_lower_bound(eff, hat_aa, p.rn_k, rho_k, 1.0).per_subcarrier_power;
        prof_ab[t] = ofdm_rate_lower_bound(eff, hat_ab, p.rn_k, rho_k, 1.0).per_subcarrier_power;
    });
    for (std::size_t k = 0; k < k_sub; ++k) {
        double sums[3] = {0.0, 0.0, 0.0};
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            sums[0] += prof_perfect[t][k];
            sums[1] += prof_aa[t][k];
            sums[2] += prof_ab[t][k];
        }
        for (int m = 0; m < 3; ++m)
            res.series[m].push_back(sums[m] / static_cast<double>(cfg.trials));
    }
    return res;
}

double round12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace

double empirical_snr(const LinkModel& model, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw Error("empirical SNR needs at least one trial");
    const std::size_t n_t = model.F.rows(), n_r = model.Q.rows();
    const CMat l_n = cholesky_lower(model.R_n);
    double signal = 0.0, noise = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ChannelRealization ch =
            draw_channel(model.Rt_half, model.Rr_half, model.F, model.Q, derive_seed(seed, 2 * t));
        Rng rng(derive_seed(seed, 2 * t + 1));
        CMat x(n_t, 1);
        for (std::size_t j = 0; j < n_t; ++j) x(j, 0) = rng.bpsk();
        signal += model.rho * sq_norm(ch.H_eff * x);
        CMat w(n_r, 1);
        for (std::size_t i = 0; i < n_r; ++i) w(i, 0) = rng.cnormal();
        noise += sq_norm(l_n * w);
    }
    return signal / noise;
}

double nmse(const std::vector<CMat>& estimates, const std::vector<CMat>& truths) {
    if (estimates.size() != truths.size() || estimates.empty())
        throw DimensionMismatch("need matched, nonempty estimate/truth collections");
    double err = 0.0, pow = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (!estimates[i].same_shape(truths[i]))
            throw DimensionMismatch("estimate and truth shapes differ");
        err += sq_norm(estimates[i] - truths[i]);
        pow += sq_norm(truths[i]);
    }
    return pow > 0.0 ? err / pow : 0.0;
}

double theoretical_nmse(const CMat& e, const CMat& r) {
    if (!e.square() || !r.square()) throw DimensionMismatch("covariances must be square");
    return trace(e).real() / trace(r).real();
}

SweepResult run_sweep(const ExperimentConfig& cfg, std::size_t threads) {
    cfg.validate();
    if (threads < 1) threads = 1;
    if (cfg.scenario == "nmse-vs-power") return sweep_sc_nmse(cfg, threads, true);
    if (cfg.scenario == "nmse-vs-frequency") return sweep_sc_nmse(cfg, threads, false);
    if (cfg.scenario == "nmse-vs-taps") return sweep_mc_taps(cfg, threads);
    if (cfg.scenario == "snr-vs-frequency") return sweep_snr_freq(cfg, threads);
    if (cfg.scenario == "rate-vs-power") return sweep_sc_rate(cfg, threads, true);
    if (cfg.scenario == "rate-vs-frequency") return sweep_sc_rate(cfg, threads, false);
    if (cfg.scenario == "power-vs-subcarrier") return sweep_mc_power_profile(cfg, threads);
    throw ConfigError("scenario", "unknown scenario '" + cfg.scenario + "'");
}

void emit(const SweepResult& result, const std::string& path, const std::string& format) {
    if (result.axis.empty() || result.methods.empty())
        throw ConfigError("series", "nothing to emit: empty axis or method list");
    if (result.series.size() != result.methods.size())
        throw ConfigError("series", "series count does not match method count");
    for (const std::vector<double>& s : result.series) {
        if (s.size() != result.axis.size())
            throw ConfigError("series", "series length does not match axis length");
        for (const double v : s)
            if (!std::isfinite(v)) throw ConfigError("series", "non-finite value in series");
    }
    for (const double v : result.axis)
        if (!std::isfinite(v)) throw ConfigError("series", "non-finite value on axis");

    std::string text;
    char buf[40];
    if (format == "csv") {
        text = "axis";
        for (const std::string& m : result.methods) text += "," + m;
        text += ",unit\n";
        for (std::size_t i = 0; i < result.axis.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", result.axis[i]);
            text += buf;
            for (const std::vector<double>& s : result.series) {
                std::snprintf(buf, sizeof buf, ",%.12g", s[i]);
                text += buf;
            }
            text += "," + result.unit + "\n";
        }
    } else if (format == "json") {
        nlohmann::json j;
        j["axis_name"] = result.axis_name;
        nlohmann::json axis = nlohmann::json::array();
        for (const double v : result.axis) axis.push_back(round12(v));
        j["axis"] = std::move(axis);
        j["methods"] = result.methods;
        nlohmann::json series = nlohmann::json::object();
        for (std::size_t m = 0; m < result.methods.size(); ++m) {
            nlohmann::json col = nlohmann::json::array();
            for (const double v : result.series[m]) col.push_back(round12(v));
            series[result.methods[m]] = std::move(col);
        }
        j["series"] = std::move(series);
        j["unit"] = result.unit;
        j["config_hash"] = result.config_hash;
        j["trials"] = result.trials;
        text = j.dump(2) + "\n";
    } else {
        throw ConfigError("format", "unknown output format '" + format + "'");
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace mpmimo
