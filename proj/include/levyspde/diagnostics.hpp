#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "levyspde/ensemble.hpp"
#include "levyspde/errors.hpp"
#include "levyspde/spde_engine.hpp"
#include "levyspde/stats.hpp"

namespace levyspde {

// ---------------------------------------------------------------------------
// Bounded-Lipschitz test functions with analytically known Lipschitz constants.
// ---------------------------------------------------------------------------
enum class PsiKind { constant, tanh_mode1, clipped_norm };

inline const char* psi_name(PsiKind k) {
    switch (k) {
        case PsiKind::constant: return "constant";
        case PsiKind::tanh_mode1: return "tanh_mode1";
        case PsiKind::clipped_norm: return "clipped_norm";
    }
    return "?";
}

inline double psi_lip(PsiKind k) { return k == PsiKind::constant ? 0.0 : 1.0; }

inline double psi_eval(PsiKind k, const double* state, int modes) {
    switch (k) {
        case PsiKind::constant: return 1.0;
        case PsiKind::tanh_mode1: return std::tanh(modes > 0 ? state[0] : 0.0);
        case PsiKind::clipped_norm: {
            double s = 0.0;
            for (int i = 0; i < modes; ++i) s += state[i] * state[i];
            return std::min(std::sqrt(s), 4.0);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Stationarity: per-lag, per-mode marginal KS plus a joint two-time CF check.
// ---------------------------------------------------------------------------
struct StationarityMarginal {
    double lag = 0.0;
    int mode = 0; // 1-based
    KsResult ks;
};

struct StationarityJoint {
    double lag = 0.0;
    double max_gap = 0.0;
    double band = 0.0;
    bool pass = false;
    bool evaluated = false;
};

struct StationarityReport {
    std::vector<StationarityMarginal> marginals;
    std::vector<StationarityJoint> joint;
    bool pass = false;
    // retained sample sets (mode-major) for CSV dumps and downstream KS reuse
    std::vector<std::vector<double>> base_samples;
    std::vector<std::vector<std::vector<double>>> shifted_samples;
};

// Core decision from collected samples; base[m] are the mode-(m+1) samples of
// r(0), shifted[l][m] those of r(lag_l). joint pairs (when provided) hold
// (r_1(0), r_1(h)) against (r_1(h), r_1(2h)).
inline StationarityReport stationarity_from_samples(
    const std::vector<std::vector<double>>& base,
    const std::vector<std::vector<std::vector<double>>>& shifted,
    const std::vector<double>& lags,
    const std::vector<std::optional<std::array<std::vector<double>, 4>>>& joint_pairs) {
    StationarityReport rep;
    rep.pass = true;
    for (std::size_t l = 0; l < lags.size(); ++l) {
        for (std::size_t m = 0; m < base.size(); ++m) {
            StationarityMarginal sm;
            sm.lag = lags[l];
            sm.mode = static_cast<int>(m) + 1;
            sm.ks = ks_two_sample({base[m]}, {shifted[l][m]});
            rep.pass = rep.pass && sm.ks.pass;
            rep.marginals.push_back(std::move(sm));
        }
        StationarityJoint j;
        j.lag = lags[l];
        if (l < joint_pairs.size() && joint_pairs[l]) {
            const auto& p = *joint_pairs[l];
            const int M = static_cast<int>(p[0].size());
            j.evaluated = true;
            j.band = 6.0 / std::sqrt(static_cast<double>(M));
            static const double grid[3] = {-1.0, 0.5, 1.0};
            for (double u : grid)
                for (double v : grid) {
                    std::complex<double> a{0.0, 0.0}, b{0.0, 0.0};
                    for (int i = 0; i < M; ++i) {
                        a += std::exp(std::complex<double>(0.0, u * p[0][i] + v * p[1][i]));
                        b += std::exp(std::complex<double>(0.0, u * p[2][i] + v * p[3][i]));
                    }
                    j.max_gap = std::max(j.max_gap, std::abs(a - b) / static_cast<double>(M));
                }
            j.pass = j.max_gap < j.band;
            rep.pass = rep.pass && j.pass;
        }
        rep.joint.push_back(j);
    }
    return rep;
}

// Marches M stationary trajectories and compares marginals of r(0) against
// r(lag) for each lag; the joint two-time CF is checked whenever 2*lag fits
// inside the horizon.
inline StationarityReport stationarity_test(const SolverConfig& cfg,
                                            const std::vector<double>& lags, int n_stat_modes,
                                            int M, std::uint64_t seed, int threads) {
    validate_solver_config(cfg);
    if (M < 1000) throw HypothesisError("stationarity test needs an ensemble of at least 1000");
    for (double lag : lags)
        if (lag < 0.0 || lag > cfg.T + 1e-12)
            throw ConfigError("stationarity lags must lie within [0, T]");
    const int K = std::min(n_stat_modes, cfg.op.dim);
    std::vector<std::vector<double>> base(static_cast<std::size_t>(K),
                                          std::vector<double>(static_cast<std::size_t>(M)));
    std::vector<std::vector<std::vector<double>>> shifted(
        lags.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(K),
                                                      std::vector<double>(static_cast<std::size_t>(M))));
    std::vector<std::optional<std::array<std::vector<double>, 4>>> joint_pairs(lags.size());
    for (std::size_t l = 0; l < lags.size(); ++l)
        if (lags[l] > 0.0 && 2.0 * lags[l] <= cfg.T + 1e-12) {
            joint_pairs[l].emplace();
            for (auto& v : *joint_pairs[l]) v.resize(static_cast<std::size_t>(M));
        }

    parallel_trajectories(M, threads, [&](int i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        const DoubleSidedPath noise(cfg.noise, cfg.xi, cfg.T, cfg.dt, rng);
        const PathSample r = stationary_path(cfg, noise);
        const int i0 = r.index_of(0.0);
        for (int m = 0; m < K; ++m) base[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = r.state(i0)[m];
        for (std::size_t l = 0; l < lags.size(); ++l) {
            const int il = r.index_of(lags[l]);
            for (int m = 0; m < K; ++m)
                shifted[l][static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = r.state(il)[m];
            if (joint_pairs[l]) {
                const int i2 = r.index_of(2.0 * lags[l]);
                auto& p = *joint_pairs[l];
                p[0][static_cast<std::size_t>(i)] = r.state(i0)[0];
                p[1][static_cast<std::size_t>(i)] = r.state(il)[0];
                p[2][static_cast<std::size_t>(i)] = r.state(il)[0];
                p[3][static_cast<std::size_t>(i)] = r.state(i2)[0];
            }
        }
    });
    StationarityReport rep = stationarity_from_samples(base, shifted, lags, joint_pairs);
    rep.base_samples = std::move(base);
    rep.shifted_samples = std::move(shifted);
    return rep;
}

// ---------------------------------------------------------------------------
// Exponential mixing: gap(t) = |P_t psi(x) - mu(psi)| fitted against e^{-rate t}.
// ---------------------------------------------------------------------------
struct MixingReport {
    PsiKind psi = PsiKind::tanh_mode1;
    double lip = 1.0;
    std::vector<double> times;
    std::vector<double> gaps;
    std::vector<double> stderrs;
    std::vector<bool> usable; // gap > 3 * stderr
    double mu_psi = 0.0;
    double mu_psi_stderr = 0.0;
    bool enough_signal = false;
    double fitted_rate = 0.0;
    double rate_ci_halfwidth = 0.0; // ~95% from the regression slope stderr
    double reference_rate = 0.0;    // conservative omega - eta used for c(x)
    double c_estimate = 0.0;        // sup_t gap(t) e^{rate_ref t} / lip
};

namespace detail {

inline double slope_stderr(const std::vector<double>& t, const std::vector<double>& y,
                           const LineFit& fit) {
    const std::size_t n = t.size();
    if (n < 3) return 0.0;
    double tbar = 0.0;
    for (double v : t) tbar += v;
    tbar /= static_cast<double>(n);
    double ss_res = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * t[i]);
        ss_res += e * e;
        stt += (t[i] - tbar) * (t[i] - tbar);
    }
    return std::sqrt(ss_res / static_cast<double>(n - 2) / stt);
}

} // namespace detail

// Moment precheck for the mixing hypotheses: estimates
// sup_t E(|L_A(t)| + |F(L_A(t))|) on a small time grid. Only finite-moment
// (compound Poisson) noise qualifies; the stable families are refused.
inline double mixing_moment_precheck(const SolverConfig& cfg, int M, std::uint64_t seed) {
    if (!std::holds_alternative<CompoundPoisson>(cfg.noise.family))
        throw HypothesisError(
            "mixing estimation requires finite moments of the stochastic convolution and of "
            "F(L_A(t)); only compound Poisson noise qualifies");
    DriftEvaluator drift(cfg);
    double worst = 0.0;
    const double t_grid[5] = {0.2, 0.5, 1.0, 2.0, 4.0};
    for (double t : t_grid) {
        double acc = 0.0;
        for (int i = 0; i < M; ++i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i), 0xF0CADAull);
            CoefVector la = ou_step(cfg.op, cfg.noise, CoefVector(static_cast<std::size_t>(cfg.op.dim), 0.0), t, rng);
            double contrib = l2_norm(la);
            if (drift.active()) {
                CoefVector f;
                drift(la, f);
                contrib += l2_norm(f);
            }
            acc += contrib;
        }
        worst = std::max(worst, acc / M);
    }
    if (!std::isfinite(worst))
        throw HypothesisError("moment precheck produced a non-finite estimate");
    return worst;
}

// Ensemble estimate of the mixing gap from the fixed initial point x; mu(psi)
// is sampled from the exact invariant law when the drift is absent, otherwise
// from the stationary construction. The rate is fitted only on times whose
// signal exceeds 3 Monte Carlo standard errors.
inline MixingReport mixing_estimate(const SolverConfig& cfg, PsiKind psi, const CoefVector& x,
                                    const std::vector<double>& times, int M, std::uint64_t seed,
                                    int threads) {
    validate_solver_config(cfg);
    mixing_moment_precheck(cfg, std::min(M, 200), seed);
    MixingReport rep;
    rep.psi = psi;
    rep.lip = psi_lip(psi);
    rep.times = times;
    rep.reference_rate = cfg.op.omega - cfg.eta();

    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, t);
    const int modes = cfg.op.dim;

    // P_t psi(x): one trajectory from x records psi at every requested time.
    std::vector<std::vector<double>> vals(times.size(),
                                          std::vector<double>(static_cast<std::size_t>(M)));
    SolverConfig run = cfg;
    run.T = t_max > 0.0 ? t_max : cfg.dt;
    run.x0 = x;
    parallel_trajectories(M, threads, [&](int i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        const DoubleSidedPath noise(run.noise, 0.0, run.T, run.dt, rng);
        const PathSample p = solve_path(run, noise);
        for (std::size_t j = 0; j < times.size(); ++j)
            vals[j][static_cast<std::size_t>(i)] = psi_eval(psi, p.state(p.index_of(times[j])), modes);
    });

    // mu(psi) from stationary samples.
    std::vector<double> mu_samples(static_cast<std::size_t>(M));
    if (!cfg.drift) {
        parallel_trajectories(M, threads, [&](int i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i), 0x5EEDull);
            const CoefVector xi_draw = sample_xi(cfg.op, cfg.noise, rng);
            mu_samples[static_cast<std::size_t>(i)] = psi_eval(psi, xi_draw.data(), modes);
        });
    } else {
        parallel_trajectories(M, threads, [&](int i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i), 0x5EEDull);
            SolverConfig sc = cfg;
            sc.T = cfg.dt; // only r(0) is consumed
            const DoubleSidedPath noise(sc.noise, sc.xi, sc.T, sc.dt, rng);
            const PathSample r = stationary_path(sc, noise);
            mu_samples[static_cast<std::size_t>(i)] = psi_eval(psi, r.state(r.index_of(0.0)), modes);
        });
    }
    rep.mu_psi = sample_mean(mu_samples);
    rep.mu_psi_stderr = sample_stderr(mu_samples);

    std::vector<double> fit_t, fit_y;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double mean = sample_mean(vals[j]);
        const double se = std::sqrt(sample_stderr(vals[j]) * sample_stderr(vals[j]) +
                                    rep.mu_psi_stderr * rep.mu_psi_stderr);
        const double gap = std::abs(mean - rep.mu_psi);
        rep.gaps.push_back(gap);
        rep.stderrs.push_back(se);
        const bool ok = gap > 3.0 * se;
        rep.usable.push_back(ok);
        if (ok) {
            fit_t.push_back(times[j]);
            fit_y.push_back(std::log(gap));
        }
    }
    rep.enough_signal = fit_t.size() >= 3;
    if (rep.enough_signal) {
        std::vector<double> raw(fit_y.size());
        for (std::size_t i = 0; i < fit_y.size(); ++i) raw[i] = std::exp(fit_y[i]);
        const LineFit f = decay_rate_fit(fit_t, raw);
        rep.fitted_rate = -f.slope;
        rep.rate_ci_halfwidth = 2.0 * detail::slope_stderr(fit_t, fit_y, f);
        for (std::size_t j = 0; j < times.size(); ++j)
            if (rep.usable[j] && rep.lip > 0.0)
                rep.c_estimate = std::max(
                    rep.c_estimate, rep.gaps[j] * std::exp(rep.reference_rate * times[j]) / rep.lip);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Invariant law = law of the stationary component: per-mode three-way KS.
// ---------------------------------------------------------------------------
struct LawPairCheck {
    int mode = 0; // 1-based
    std::string pair;
    KsResult ks;
};

struct LawEqualityReport {
    std::vector<LawPairCheck> checks;
    bool includes_exact_xi = false;
    bool pass = false;
    // retained per-mode sample sets for CSV dumps (x_T, r_0, and xi when exact)
    std::vector<std::vector<double>> x_samples;
    std::vector<std::vector<double>> r_samples;
    std::vector<std::vector<double>> xi_samples;
};

// Compares X(T) started from x0 with r(0) from the coupled construction
// (independent of X(T): r(0) is measurable w.r.t. the past noise), and in the
// linear case also with exact draws of xi.
inline LawEqualityReport invariant_law_equality(const SolverConfig& cfg, int M, double T,
                                                int modes_checked, std::uint64_t seed,
                                                int threads) {
    SolverConfig run = cfg;
    run.T = T;
    validate_solver_config(run);
    if ((run.op.omega - run.eta()) * T < 10.0 * (1.0 - 1e-12))
        throw HypothesisError(
            "law-equality comparison requires (omega - eta) T >= 10 so the transient has decayed");
    const int K = std::min(modes_checked, run.op.dim);
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(K),
                                        std::vector<double>(static_cast<std::size_t>(M)));
    auto rs = xs;
    parallel_trajectories(M, threads, [&](int i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        const Decomposition dec = decompose(run, rng);
        const int iT = dec.X.index_of(T);
        const int i0 = dec.r.index_of(0.0);
        for (int m = 0; m < K; ++m) {
            xs[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = dec.X.state(iT)[m];
            rs[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = dec.r.state(i0)[m];
        }
    });

    LawEqualityReport rep;
    rep.pass = true;
    std::vector<std::vector<double>> xis;
    if (!run.drift) {
        rep.includes_exact_xi = true;
        xis.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(M)));
        parallel_trajectories(M, threads, [&](int i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i), 0x5EEDull);
            const CoefVector v = sample_xi(run.op, run.noise, rng);
            for (int m = 0; m < K; ++m)
                xis[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(m)];
        });
    }
    for (int m = 0; m < K; ++m) {
        auto add = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
            LawPairCheck c;
            c.mode = m + 1;
            c.pair = name;
            c.ks = ks_two_sample({a}, {b});
            rep.pass = rep.pass && c.ks.pass;
            rep.checks.push_back(std::move(c));
        };
        add("X(T):r(0)", xs[static_cast<std::size_t>(m)], rs[static_cast<std::size_t>(m)]);
        if (rep.includes_exact_xi) {
            add("X(T):xi", xs[static_cast<std::size_t>(m)], xis[static_cast<std::size_t>(m)]);
            add("r(0):xi", rs[static_cast<std::size_t>(m)], xis[static_cast<std::size_t>(m)]);
        }
    }
    rep.x_samples = std::move(xs);
    rep.r_samples = std::move(rs);
    rep.xi_samples = std::move(xis);
    return rep;
}

} // namespace levyspde
