#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "levyspde/cylnoise.hpp"
#include "levyspde/drift.hpp"
#include "levyspde/errors.hpp"
#include "levyspde/ou_invariant.hpp"
#include "levyspde/rng.hpp"
#include "levyspde/spectral.hpp"

namespace levyspde {

inline constexpr double kInfiniteYosida = std::numeric_limits<double>::infinity();

// Full problem description for one trajectory solve. m = infinity means the
// drift g is applied directly; a finite m uses the Yosida approximant F_m.
// drift absent means the linear equation (F identically 0).
struct SolverConfig {
    SpectralOperator op;
    CylNoiseSpec noise;
    std::optional<DriftSpec> drift;
    double m = kInfiniteYosida;
    int galerkin_n = 0; // drift projection modes; 0 = op.dim
    double dt = 1e-3;
    double T = 1.0;
    double xi = 0.0; // burn-in length for the stationary construction
    CoefVector x0;

    double eta() const { return drift ? drift->eta : 0.0; }
    int modes() const { return op.dim; }
    int drift_modes() const { return galerkin_n > 0 ? galerkin_n : op.dim; }
};

inline void validate_solver_config(const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("time step dt must be positive");
    if (!(cfg.T > 0.0)) throw ConfigError("horizon T must be positive");
    if (cfg.xi < 0.0) throw ConfigError("burn-in xi must be nonnegative");
    if (cfg.noise.n_modes != cfg.op.dim)
        throw ConfigError("noise truncation must match the operator truncation");
    if (cfg.drift_modes() > cfg.op.dim)
        throw ConfigError("Galerkin mode count cannot exceed the operator truncation");
    if (cfg.drift) {
        if (!(cfg.op.omega > cfg.drift->eta))
            throw HypothesisError(
                "spectral gap must exceed the drift's one-sided constant (omega > eta), "
                "otherwise A + F is not maximal dissipative");
        if (!(cfg.m > cfg.drift->eta))
            throw HypothesisError(
                "Yosida parameter must exceed the drift's one-sided constant eta (resolvent not "
                "single-valued)");
    }
}

// Trajectory on a uniform grid: row i is the state at t0 + i dt.
struct PathSample {
    double t0 = 0.0;
    double dt = 0.0;
    int n_modes = 0;
    std::vector<double> data;

    int steps() const { return static_cast<int>(data.size()) / n_modes - 1; }
    double time(int i) const { return t0 + i * dt; }
    const double* state(int i) const {
        return data.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_modes);
    }
    double* state(int i) {
        return data.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_modes);
    }
    CoefVector state_vec(int i) const {
        return CoefVector(state(i), state(i) + n_modes);
    }
    // Index of the grid point at time t (must lie on the grid).
    int index_of(double t) const {
        const int i = static_cast<int>(std::llround((t - t0) / dt));
        if (i < 0 || i > steps() || std::abs(time(i) - t) > 1e-9 * (1.0 + std::abs(t)))
            throw ConfigError("requested time is not on the path grid");
        return i;
    }
};

// Pi_n F_m Pi_n in eigencoordinates with reusable scratch buffers.
class DriftEvaluator {
public:
    DriftEvaluator(const SolverConfig& cfg)
        : n_(cfg.drift_modes()), active_(cfg.drift.has_value()) {
        if (!active_) return;
        map_ = CollocationMap::dirichlet_sine(n_, cfg.drift->oversampling, cfg.op.length);
        g_ = cfg.drift->g;
        if (cfg.m != kInfiniteYosida) fm_.emplace(g_, cfg.m, cfg.drift->eta);
    }

    bool active() const { return active_; }

    // out = Pi_n F_m(Pi_n x), sized like x with zeros above n.
    void operator()(const CoefVector& x, CoefVector& out) {
        out.assign(x.size(), 0.0);
        if (!active_) return;
        in_.assign(x.begin(), x.begin() + std::min<std::size_t>(x.size(), static_cast<std::size_t>(n_)));
        map_.to_grid(in_, grid_);
        if (fm_) {
            for (double& v : grid_) v = (*fm_)(v);
        } else {
            for (double& v : grid_) v = poly_eval(g_, v);
        }
        for (double v : grid_)
            if (!std::isfinite(v))
                throw OverflowError("drift evaluation produced a non-finite value (time step too large?)");
        map_.to_coefs(grid_, coef_);
        for (int k = 0; k < n_ && k < static_cast<int>(out.size()); ++k)
            out[static_cast<std::size_t>(k)] = coef_[static_cast<std::size_t>(k)];
    }

private:
    int n_;
    bool active_;
    CollocationMap map_;
    Poly g_;
    std::optional<YosidaMap> fm_;
    CoefVector in_, coef_;
    std::vector<double> grid_;
};

// One exponential-Euler step from state x over [t_i, t_i + dt]:
//   x+ = e^{dt A}(x + dt Pi_n F_m Pi_n x) + (exact per-mode noise convolution).
// The linear flow and the noise convolution are exact in law; only the drift
// term carries the O(dt) error.
inline CoefVector step(const SolverConfig& cfg, const CoefVector& x,
                       const CoefVector& noise_convolution, double dt) {
    DriftEvaluator drift(cfg);
    CoefVector d;
    drift(x, d);
    CoefVector y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        y[k] = std::exp(-cfg.op.lambdas[k] * dt) * (x[k] + dt * d[k]) + noise_convolution[k];
    return y;
}

namespace detail {

// March the exponential-Euler recursion over grid steps [start_step, total)
// of the noise path, starting from `init`.
inline PathSample march(const SolverConfig& cfg, const DoubleSidedPath& noise, int start_step,
                        CoefVector init) {
    const int modes = cfg.op.dim;
    const int total = noise.steps_total();
    const int rows = total - start_step + 1;
    PathSample out;
    out.t0 = noise.time_of_step(start_step);
    out.dt = cfg.dt;
    out.n_modes = modes;
    out.data.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(modes));

    std::vector<double> decay(static_cast<std::size_t>(modes));
    for (int k = 0; k < modes; ++k)
        decay[static_cast<std::size_t>(k)] = std::exp(-cfg.op.lambdas[static_cast<std::size_t>(k)] * cfg.dt);
    const std::vector<double> conv = noise.conv_matrix(cfg.op.lambdas);

    DriftEvaluator drift(cfg);
    CoefVector x = std::move(init);
    x.resize(static_cast<std::size_t>(modes), 0.0);
    CoefVector d(static_cast<std::size_t>(modes), 0.0);
    std::copy(x.begin(), x.end(), out.state(0));
    for (int i = start_step; i < total; ++i) {
        drift(x, d);
        const double* conv_row = &conv[static_cast<std::size_t>(i) * static_cast<std::size_t>(modes)];
        for (int k = 0; k < modes; ++k) {
            auto ku = static_cast<std::size_t>(k);
            x[ku] = decay[ku] * (x[ku] + cfg.dt * d[ku]) + conv_row[k];
        }
        std::copy(x.begin(), x.end(), out.state(i - start_step + 1));
    }
    return out;
}

} // namespace detail

// Solution of the approximating equation on [0, T] from X(0) = Pi_n x0,
// consuming the future block of the noise path.
inline PathSample solve_path(const SolverConfig& cfg, const DoubleSidedPath& noise) {
    validate_solver_config(cfg);
    return detail::march(cfg, noise, noise.steps_past(), project(cfg.x0, cfg.drift_modes()));
}

// Stationary-process construction: integrate from t = -xi with initial value
// e^{-xi A} Pi_n x0 over the past noise, then across [0, T] on the shared
// future noise. The restriction to [0, T] approximates the stationary process
// with burn-in error of order e^{-(omega-eta) xi}.
inline PathSample stationary_path(const SolverConfig& cfg, const DoubleSidedPath& noise,
                                  std::optional<double> burn_in = std::nullopt) {
    validate_solver_config(cfg);
    const double xi = burn_in.value_or(noise.xi());
    const int back_steps = static_cast<int>(std::llround(xi / cfg.dt));
    if (back_steps > noise.steps_past())
        throw ConfigError("burn-in exceeds the past extent of the noise path");
    const int start = noise.steps_past() - back_steps;
    return detail::march(cfg, noise, start,
                         semigroup_apply(cfg.op, xi, project(cfg.x0, cfg.drift_modes())));
}

inline double burn_in_deficit(const SolverConfig& cfg) {
    return cfg.xi * (cfg.op.omega - cfg.eta()); // recommended >= 10
}

// Picard iteration for the stationary integral equation on the grid [-xi, T]:
//   r^{0}(t) = x0,
//   r^{k+1}(t_i) = sum_{j<i} e^{(t_i-t_j)A} Pi_n F_m Pi_n r^{k}(t_j) dt + N(t_i),
// with N the double-sided stochastic convolution accumulated exactly per step.
// Left-endpoint quadrature matches the exponential-Euler kernel, so the fixed
// point coincides with the marched path up to the decayed initial term.
inline PathSample picard_stationary(const SolverConfig& cfg, const DoubleSidedPath& noise,
                                    int k_iters) {
    validate_solver_config(cfg);
    if (k_iters < 0) throw ConfigError("Picard iteration count must be nonnegative");
    const int modes = cfg.op.dim;
    const int total = noise.steps_total();
    const int rows = total + 1;

    std::vector<double> decay(static_cast<std::size_t>(modes));
    for (int k = 0; k < modes; ++k)
        decay[static_cast<std::size_t>(k)] = std::exp(-cfg.op.lambdas[static_cast<std::size_t>(k)] * cfg.dt);
    const std::vector<double> conv = noise.conv_matrix(cfg.op.lambdas);

    // N(t_{i+1}) = e^{-dt A} N(t_i) + conv_i, N(-xi) = 0.
    std::vector<double> noise_term(static_cast<std::size_t>(rows) * static_cast<std::size_t>(modes), 0.0);
    for (int i = 0; i < total; ++i)
        for (int k = 0; k < modes; ++k) {
            auto idx = [&](int row) {
                return static_cast<std::size_t>(row) * static_cast<std::size_t>(modes) +
                       static_cast<std::size_t>(k);
            };
            noise_term[idx(i + 1)] =
                decay[static_cast<std::size_t>(k)] * noise_term[idx(i)] +
                conv[static_cast<std::size_t>(i) * static_cast<std::size_t>(modes) + static_cast<std::size_t>(k)];
        }

    PathSample iterate;
    iterate.t0 = -noise.xi();
    iterate.dt = cfg.dt;
    iterate.n_modes = modes;
    iterate.data.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(modes), 0.0);
    CoefVector x0 = cfg.x0;
    x0.resize(static_cast<std::size_t>(modes), 0.0);
    for (int i = 0; i < rows; ++i) std::copy(x0.begin(), x0.end(), iterate.state(i));

    DriftEvaluator drift(cfg);
    CoefVector d(static_cast<std::size_t>(modes), 0.0);
    PathSample next = iterate;
    for (int k_it = 0; k_it < k_iters; ++k_it) {
        // accumulated drift convolution D(t_{i+1}) = e^{-dt A}(D(t_i) + dt F(r^k(t_i)))
        CoefVector acc(static_cast<std::size_t>(modes), 0.0);
        std::copy(noise_term.begin(), noise_term.begin() + modes, next.state(0));
        for (int i = 0; i < total; ++i) {
            drift(iterate.state_vec(i), d);
            for (int k = 0; k < modes; ++k) {
                auto ku = static_cast<std::size_t>(k);
                acc[ku] = decay[ku] * (acc[ku] + cfg.dt * d[ku]);
            }
            double* row = next.state(i + 1);
            const double* nrow = &noise_term[static_cast<std::size_t>(i + 1) * static_cast<std::size_t>(modes)];
            for (int k = 0; k < modes; ++k) row[k] = acc[static_cast<std::size_t>(k)] + nrow[k];
        }
        std::swap(iterate.data, next.data);
    }
    return iterate;
}

// Coupled decomposition X = r + v on [0, T]; both X and r consume the same
// future noise, so v = X - r is the pathwise-coupled vanishing component.
struct Decomposition {
    PathSample X;
    PathSample r;
    PathSample v;
};

inline Decomposition decompose(const SolverConfig& cfg, RngStream& rng) {
    validate_solver_config(cfg);
    const DoubleSidedPath noise(cfg.noise, cfg.xi, cfg.T, cfg.dt, rng);
    PathSample X = solve_path(cfg, noise);
    const PathSample r_full = stationary_path(cfg, noise);
    const int offset = r_full.index_of(0.0);

    PathSample r;
    r.t0 = 0.0;
    r.dt = cfg.dt;
    r.n_modes = r_full.n_modes;
    r.data.assign(r_full.data.begin() + static_cast<std::ptrdiff_t>(offset) * r_full.n_modes,
                  r_full.data.end());
    PathSample v = r;
    for (std::size_t j = 0; j < v.data.size(); ++j) v.data[j] = X.data[j] - r.data[j];
    return {std::move(X), std::move(r), std::move(v)};
}

} // namespace levyspde
