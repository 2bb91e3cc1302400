#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "levyspde/errors.hpp"
#include "levyspde/levy1d.hpp"
#include "levyspde/rng.hpp"
#include "levyspde/spectral.hpp"

namespace levyspde {

// Power decay tag: a_k = k^{-exponent}.
struct PowerDecay {
    double exponent = 0.0;
};

// Cylindrical noise B dL with L(t) = sum_k beta_k L^k(t) e_k and B diagonal,
// (B L)(t) = sum_k b_k beta_k L^k(t) e_k. Series decisions use the symbolic
// decay tags; specs built from raw amplitude vectors carry no tags and are
// undecidable.
struct CylNoiseSpec {
    LevyFamily family;
    int n_modes = 0;
    std::vector<double> betas;
    std::vector<double> bs;
    std::optional<PowerDecay> beta_decay;
    std::optional<PowerDecay> b_decay;

    double amplitude(int k) const {
        return bs[static_cast<std::size_t>(k)] * betas[static_cast<std::size_t>(k)];
    }

    static CylNoiseSpec power(LevyFamily family, double theta, double b_theta, int n_modes) {
        if (n_modes < 1) throw ConfigError("noise truncation must have at least one mode");
        if (theta < 0.0 || b_theta < 0.0) throw ConfigError("decay exponents must be nonnegative");
        CylNoiseSpec s;
        s.family = std::move(family);
        s.n_modes = n_modes;
        s.beta_decay = PowerDecay{theta};
        s.b_decay = PowerDecay{b_theta};
        s.betas.resize(static_cast<std::size_t>(n_modes));
        s.bs.resize(static_cast<std::size_t>(n_modes));
        for (int k = 1; k <= n_modes; ++k) {
            s.betas[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -theta);
            s.bs[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -b_theta);
        }
        return s;
    }

    static CylNoiseSpec from_amplitudes(LevyFamily family, std::vector<double> betas,
                                        std::vector<double> bs) {
        if (betas.empty() || betas.size() != bs.size())
            throw ConfigError("amplitude vectors must be nonempty and of equal length");
        CylNoiseSpec s;
        s.family = std::move(family);
        s.n_modes = static_cast<int>(betas.size());
        s.betas = std::move(betas);
        s.bs = std::move(bs);
        return s;
    }
};

namespace detail {

// Convergence of sum_k [ beta_k^2 int_{|y|<1/beta_k} y^2 nu + nu(|y| >= 1/beta_k) ]
// for beta_k = k^{-theta}, decided per family:
//   - alpha-stable: both terms scale like beta^alpha  =>  alpha * theta > 1.
//   - compound Poisson, bounded jumps: second-moment term ~ beta_k^2 and the
//     tail-mass term has finitely many nonzero entries  =>  2 * theta > 1.
//   - slow log tail: tail mass ~ 2c/(theta log k); the series diverges for
//     every power decay.
inline bool power_decay_admissible(const LevyFamily& family, double theta) {
    return std::visit(
        [theta](const auto& f) -> bool {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return f.rate == 0.0 || theta > 0.5;
            } else if constexpr (std::is_same_v<T, SymmetricAlphaStable>) {
                return f.alpha * theta > 1.0;
            } else {
                return false;
            }
        },
        family);
}

} // namespace detail

// Decides whether the cylindrical series defines an H-valued Levy process
// (square-summability of the coordinate processes).
inline bool admissible(const CylNoiseSpec& spec) {
    if (!spec.beta_decay)
        throw UndecidableError(
            "admissibility is undecidable without a symbolic decay tag for beta_k");
    return detail::power_decay_admissible(spec.family, spec.beta_decay->exponent);
}

// Smallest sigma (in steps of 1/8) such that the reweighted amplitudes
// rho_k beta_k = k^{-(theta+sigma)} are admissible; sigma = 0 when the input
// already is. No power weight exists for the slow-log-tail family.
inline WeightSequence find_weight(const CylNoiseSpec& spec) {
    if (!spec.beta_decay)
        throw UndecidableError("weight search needs a symbolic decay tag for beta_k");
    if (std::holds_alternative<SlowLogTail>(spec.family))
        throw UndecidableError(
            "no power weight makes the slow-log-tail family admissible (tail-mass series "
            "diverges for every polynomial decay)");
    const double theta = spec.beta_decay->exponent;
    for (int eighths = 0; eighths <= 800; ++eighths) {
        const double sigma = eighths / 8.0;
        if (detail::power_decay_admissible(spec.family, theta + sigma))
            return make_power_weight(sigma, spec.n_modes);
    }
    throw UndecidableError("weight search exceeded sigma = 100");
}

// Vector of independent coordinates b_k beta_k (increment of L^k over dt).
inline CoefVector sample_noise_increment(const CylNoiseSpec& spec, double dt, RngStream& rng) {
    CoefVector v(static_cast<std::size_t>(spec.n_modes));
    if (dt == 0.0) return v;
    for (int k = 0; k < spec.n_modes; ++k)
        v[static_cast<std::size_t>(k)] = spec.amplitude(k) * sample_increment(spec.family, dt, rng);
    return v;
}

// ---------------------------------------------------------------------------
// Double-sided noise path on a uniform grid over [-xi, T].
//
// The past block [-xi, 0) is drawn from an independent substream; the future
// block [0, T] from the primary stream, so every consumer of one path object
// reads bit-identical future noise. Compound Poisson jumps are stored with
// their within-step times, making both the plain increments and the
// kernel-weighted convolution increments exact. For the stable family one
// standard draw is stored per (mode, step); the plain and kernel-weighted
// readings scale that draw by their exact marginal scales and must not be
// mixed inside a single statistic.
// ---------------------------------------------------------------------------
class DoubleSidedPath {
public:
    DoubleSidedPath(const CylNoiseSpec& spec, double xi, double T, double dt, RngStream& rng)
        : spec_(spec), xi_(xi), horizon_(T), dt_(dt) {
        if (!(dt > 0.0) || !(T > 0.0) || xi < 0.0)
            throw ConfigError("double-sided path needs dt > 0, T > 0, xi >= 0");
        steps_past_ = static_cast<int>(std::llround(xi / dt));
        steps_future_ = static_cast<int>(std::llround(T / dt));
        if (std::abs(steps_past_ * dt - xi) > 1e-9 * (1.0 + xi) ||
            std::abs(steps_future_ * dt - T) > 1e-9 * (1.0 + T))
            throw ConfigError("xi and T must be integer multiples of dt");
        const int modes = spec.n_modes;
        if (std::holds_alternative<SlowLogTail>(spec.family))
            throw UnsupportedError("slow-log-tail family supports symbolic checks only, not sampling");

        RngStream past_rng = rng.fork(0x9A57u);
        if (const auto* cp = std::get_if<CompoundPoisson>(&spec.family)) {
            jumps_.resize(static_cast<std::size_t>(modes));
            step_first_.resize(static_cast<std::size_t>(modes));
            for (int k = 0; k < modes; ++k) {
                auto& jk = jumps_[static_cast<std::size_t>(k)];
                draw_jumps(*cp, -xi_, 0.0, past_rng, jk);
                const std::size_t past_count = jk.size();
                draw_jumps(*cp, 0.0, horizon_, rng, jk);
                std::sort(jk.begin(), jk.begin() + static_cast<std::ptrdiff_t>(past_count),
                          [](const Jump& a, const Jump& b) { return a.t < b.t; });
                std::sort(jk.begin() + static_cast<std::ptrdiff_t>(past_count), jk.end(),
                          [](const Jump& a, const Jump& b) { return a.t < b.t; });
                index_steps(jk, step_first_[static_cast<std::size_t>(k)]);
            }
        } else {
            const auto& st = std::get<SymmetricAlphaStable>(spec.family);
            const int total = steps_past_ + steps_future_;
            unit_draws_.assign(static_cast<std::size_t>(modes) * static_cast<std::size_t>(total), 0.0);
            for (int i = 0; i < steps_past_; ++i)
                for (int k = 0; k < modes; ++k)
                    unit_at(k, i) = sample_standard_sas(st.alpha, past_rng);
            for (int i = steps_past_; i < total; ++i)
                for (int k = 0; k < modes; ++k)
                    unit_at(k, i) = sample_standard_sas(st.alpha, rng);
        }
    }

    const CylNoiseSpec& spec() const { return spec_; }
    double dt() const { return dt_; }
    double xi() const { return xi_; }
    double horizon() const { return horizon_; }
    int steps_past() const { return steps_past_; }
    int steps_future() const { return steps_future_; }
    int steps_total() const { return steps_past_ + steps_future_; }
    // Step i covers [time_of_step(i), time_of_step(i+1)); t = 0 is step boundary steps_past().
    double time_of_step(int i) const { return -xi_ + i * dt_; }

    // Exact convolution increment int_{t_i}^{t_{i+1}} e^{-lambda (t_{i+1}-s)} amp_k dL^k(s).
    double conv_increment(int mode, int step, double lambda) const {
        const double amp = spec_.amplitude(mode);
        if (const auto* cp = std::get_if<CompoundPoisson>(&spec_.family)) {
            (void)cp;
            const auto& jk = jumps_[static_cast<std::size_t>(mode)];
            const auto& first = step_first_[static_cast<std::size_t>(mode)];
            const double t_end = time_of_step(step + 1);
            double sum = 0.0;
            for (std::uint32_t j = first[static_cast<std::size_t>(step)];
                 j < first[static_cast<std::size_t>(step) + 1]; ++j)
                sum += std::exp(-lambda * (t_end - jk[j].t)) * jk[j].size;
            return amp * sum;
        }
        const auto& st = std::get<SymmetricAlphaStable>(spec_.family);
        return amp * stable_convolution_scale(st.alpha, st.scale, lambda, dt_) *
               unit_at(mode, step);
    }

    // Plain increment amp_k (L^k(t_{i+1}) - L^k(t_i)).
    double plain_increment(int mode, int step) const {
        const double amp = spec_.amplitude(mode);
        if (std::holds_alternative<CompoundPoisson>(spec_.family)) {
            const auto& jk = jumps_[static_cast<std::size_t>(mode)];
            const auto& first = step_first_[static_cast<std::size_t>(mode)];
            double sum = 0.0;
            for (std::uint32_t j = first[static_cast<std::size_t>(step)];
                 j < first[static_cast<std::size_t>(step) + 1]; ++j)
                sum += jk[j].size;
            return amp * sum;
        }
        const auto& st = std::get<SymmetricAlphaStable>(spec_.family);
        return amp * st.scale * std::pow(dt_, 1.0 / st.alpha) * unit_at(mode, step);
    }

    // Path value amp_k L-bar^k at grid boundary i (anchored so the value at t = 0 is 0).
    double value_at_boundary(int mode, int boundary) const {
        double v = 0.0;
        if (boundary >= steps_past_) {
            for (int i = steps_past_; i < boundary; ++i) v += plain_increment(mode, i);
        } else {
            for (int i = boundary; i < steps_past_; ++i) v -= plain_increment(mode, i);
        }
        return v;
    }

    // Row-major [step][mode] matrix of convolution increments for the given
    // eigenvalues; shared between every consumer of the same path.
    std::vector<double> conv_matrix(const std::vector<double>& lambdas) const {
        const int modes = spec_.n_modes;
        const int total = steps_total();
        std::vector<double> m(static_cast<std::size_t>(modes) * static_cast<std::size_t>(total));
        for (int i = 0; i < total; ++i)
            for (int k = 0; k < modes && k < static_cast<int>(lambdas.size()); ++k)
                m[static_cast<std::size_t>(i) * static_cast<std::size_t>(modes) +
                  static_cast<std::size_t>(k)] = conv_increment(k, i, lambdas[static_cast<std::size_t>(k)]);
        return m;
    }

private:
    struct Jump {
        double t;
        double size;
    };

    void draw_jumps(const CompoundPoisson& cp, double a, double b, RngStream& rng,
                    std::vector<Jump>& out) const {
        const std::uint64_t n = rng.poisson(cp.rate * (b - a));
        for (std::uint64_t j = 0; j < n; ++j)
            out.push_back({rng.uniform(a, b), cp.jumps.sample(rng)});
    }

    void index_steps(const std::vector<Jump>& jk, std::vector<std::uint32_t>& first) const {
        const int total = steps_total();
        first.assign(static_cast<std::size_t>(total) + 1, 0);
        std::size_t j = 0;
        for (int i = 0; i < total; ++i) {
            first[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(j);
            const double t_end = time_of_step(i + 1);
            while (j < jk.size() && jk[j].t < t_end) ++j;
        }
        first[static_cast<std::size_t>(total)] = static_cast<std::uint32_t>(j);
    }

    double& unit_at(int mode, int step) {
        return unit_draws_[static_cast<std::size_t>(step) * static_cast<std::size_t>(spec_.n_modes) +
                           static_cast<std::size_t>(mode)];
    }
    double unit_at(int mode, int step) const {
        return unit_draws_[static_cast<std::size_t>(step) * static_cast<std::size_t>(spec_.n_modes) +
                           static_cast<std::size_t>(mode)];
    }

    CylNoiseSpec spec_;
    double xi_, horizon_, dt_;
    int steps_past_ = 0, steps_future_ = 0;
    std::vector<std::vector<Jump>> jumps_;                 // compound Poisson
    std::vector<std::vector<std::uint32_t>> step_first_;   // per mode: step -> first jump index
    std::vector<double> unit_draws_;                       // stable: [step][mode]
};

// Convenience builder mirroring the free-function surface of the module.
inline DoubleSidedPath build_double_sided(const CylNoiseSpec& spec, double xi, double T,
                                          double dt, RngStream& rng) {
    return DoubleSidedPath(spec, xi, T, dt, rng);
}

} // namespace levyspde
