#pragma once

#include <cmath>
#include <variant>

#include "levyspde/errors.hpp"
#include "levyspde/quad.hpp"
#include "levyspde/rng.hpp"

namespace levyspde {

// ---------------------------------------------------------------------------
// Symmetric scalar pure-jump Levy laws. Triplet is (0, nu, 0): no Gaussian
// part, no drift, nu symmetric with int (1 ^ y^2) nu(dy) < infinity.
// ---------------------------------------------------------------------------

enum class JumpLawKind { rademacher, uniform };

// Symmetric jump-size law for the compound Poisson family: either +-scale with
// equal probability, or uniform on [-scale, scale].
struct JumpLaw {
    JumpLawKind kind = JumpLawKind::rademacher;
    double scale = 1.0;

    double cf(double h) const {
        const double z = scale * h;
        switch (kind) {
            case JumpLawKind::rademacher: return std::cos(z);
            case JumpLawKind::uniform: return std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
        }
        return 1.0;
    }
    double second_moment() const {
        return kind == JumpLawKind::rademacher ? scale * scale : scale * scale / 3.0;
    }
    double max_abs() const { return scale; }
    double sample(RngStream& rng) const {
        switch (kind) {
            case JumpLawKind::rademacher: return (rng.next_u64() & 1u) ? scale : -scale;
            case JumpLawKind::uniform: return rng.uniform(-scale, scale);
        }
        return 0.0;
    }
};

// Finite jump intensity: nu = rate * (law of one jump).
struct CompoundPoisson {
    double rate = 1.0;
    JumpLaw jumps{};
};

// psi(h) = (scale * |h|)^alpha, alpha in (0,2).
struct SymmetricAlphaStable {
    double alpha = 1.5;
    double scale = 1.0;
};

// nu density c / (y log^2 y) for |y| > e, zero inside. Finite total mass
// 2c but divergent log-moment; sampling is deliberately unsupported.
struct SlowLogTail {
    double c = 1.0;
};

using LevyFamily = std::variant<CompoundPoisson, SymmetricAlphaStable, SlowLogTail>;

// ---------------------------------------------------------------------------
// Characteristic exponent psi(h) = int (1 - cos(h y)) nu(dy).
// ---------------------------------------------------------------------------

namespace detail {

// For the slow-log-tail family, psi(h) = 2c [ mass-part - int_e^inf cos(hy) g(y) dy ]
// with g(y) = 1/(y log^2 y). The cosine integral is evaluated adaptively over a
// few leading periods and its alternating tail is Euler-accelerated between
// consecutive zeros of cos.
inline double slow_log_tail_psi(double c, double h) {
    h = std::abs(h);
    if (h == 0.0) return 0.0;
    const double e = std::exp(1.0);
    auto g = [](double y) { const double l = std::log(y); return 1.0 / (y * l * l); };
    auto integrand = [&](double y) { return std::cos(h * y) * g(y); };
    // first zero of cos(hy) past e + two periods
    const double period = 2.0 * kPi / h;
    double z = (0.5 * kPi) / h;
    while (z <= e) z += kPi / h;
    const double head_end = z + 2.0 * period;
    const double head = quad::adaptive(integrand, e, head_end, 1e-12, 8000);
    const double tail = quad::alternating_tail(integrand, head_end, kPi / h, 1e-11, 200);
    const double cos_part = head + tail;
    const double mass_part = 1.0; // int_e^inf g = 1/log(e)
    return 2.0 * c * (mass_part - cos_part);
}

} // namespace detail

inline double char_exponent(const LevyFamily& family, double h) {
    return std::visit(
        [h](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return f.rate * (1.0 - f.jumps.cf(h));
            } else if constexpr (std::is_same_v<T, SymmetricAlphaStable>) {
                return std::pow(f.scale * std::abs(h), f.alpha);
            } else {
                return detail::slow_log_tail_psi(f.c, h);
            }
        },
        family);
}

// True iff int_1^inf log(y) nu(dy) < infinity, decided symbolically.
inline bool log_moment_finite(const LevyFamily& family) {
    return std::visit(
        [](const auto& f) -> bool {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return true; // finite measure, bounded jumps
            } else if constexpr (std::is_same_v<T, SymmetricAlphaStable>) {
                return true; // log(y) y^{-1-alpha} is integrable for every alpha > 0
            } else {
                return false; // int dy/(y log y) diverges
            }
        },
        family);
}

// ---------------------------------------------------------------------------
// Exact samplers.
// ---------------------------------------------------------------------------

// Standard symmetric alpha-stable variate with cf exp(-|h|^alpha), by the
// Chambers-Mallows-Stuck transform (beta = 0).
inline double sample_standard_sas(double alpha, RngStream& rng) {
    const double u = kPi * (rng.uniform01() - 0.5); // (-pi/2, pi/2)
    if (std::abs(alpha - 1.0) < 1e-12) return std::tan(u);
    const double w = rng.exponential();
    const double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
    const double t = std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
    return s * t;
}

// One draw of L(t+dt) - L(t). Law has characteristic function exp(-dt psi(h)).
inline double sample_increment(const LevyFamily& family, double dt, RngStream& rng) {
    if (dt == 0.0) return 0.0;
    return std::visit(
        [dt, &rng](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                const std::uint64_t n = rng.poisson(f.rate * dt);
                double sum = 0.0;
                for (std::uint64_t i = 0; i < n; ++i) sum += f.jumps.sample(rng);
                return sum;
            } else if constexpr (std::is_same_v<T, SymmetricAlphaStable>) {
                return f.scale * std::pow(dt, 1.0 / f.alpha) * sample_standard_sas(f.alpha, rng);
            } else {
                throw UnsupportedError("slow-log-tail family supports symbolic checks only, not sampling");
            }
        },
        family);
}

// Scale of the stable stochastic convolution int_0^dt e^{-lambda(dt-s)} dL(s):
// cf is exp(-(scale_out |h|)^alpha) with
//   scale_out = scale * ((1 - e^{-alpha lambda dt})/(alpha lambda))^{1/alpha}.
inline double stable_convolution_scale(double alpha, double scale, double lambda, double dt) {
    const double a_l = alpha * lambda;
    const double mass = (a_l * dt < 1e-12) ? dt : (1.0 - std::exp(-a_l * dt)) / a_l;
    return scale * std::pow(mass, 1.0 / alpha);
}

// One exact-in-law draw of int_0^dt e^{-lambda(dt-s)} beta dL(s).
// Compound Poisson is simulated event by event; the stable case uses the
// closed-form scale identity. lambda = 0 degenerates to beta * increment.
inline double sample_ou_convolution(const LevyFamily& family, double lambda, double beta,
                                    double dt, RngStream& rng) {
    if (lambda < 0.0) throw HypothesisError("convolution kernel rate lambda must be nonnegative");
    if (dt == 0.0) return 0.0;
    return std::visit(
        [lambda, beta, dt, &rng](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                const std::uint64_t n = rng.poisson(f.rate * dt);
                double sum = 0.0;
                for (std::uint64_t i = 0; i < n; ++i) {
                    const double tau = rng.uniform(0.0, dt);
                    sum += std::exp(-lambda * (dt - tau)) * f.jumps.sample(rng);
                }
                return beta * sum;
            } else if constexpr (std::is_same_v<T, SymmetricAlphaStable>) {
                const double s = stable_convolution_scale(f.alpha, f.scale, lambda, dt);
                return beta * s * sample_standard_sas(f.alpha, rng);
            } else {
                throw UnsupportedError("slow-log-tail family supports symbolic checks only, not sampling");
            }
        },
        family);
}

} // namespace levyspde
