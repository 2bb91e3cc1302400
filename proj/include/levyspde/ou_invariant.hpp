#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "levyspde/cylnoise.hpp"
#include "levyspde/errors.hpp"
#include "levyspde/levy1d.hpp"
#include "levyspde/quad.hpp"
#include "levyspde/rng.hpp"
#include "levyspde/spectral.hpp"

namespace levyspde {

// Horizon with e^{-lambda U} <= 1e-8, used to truncate improper convolutions.
inline double xi_truncation_horizon(double lambda) { return 18.5 / lambda; }

// ---------------------------------------------------------------------------
// Invariant measure of the linear equation dX = AX dt + B dL: the product of
// the per-mode laws of xi_k = int_0^inf e^{-lambda_k u} b_k beta_k dL^k(u),
// with characteristic functions
//   mu_k(h) = exp( -int_0^inf psi( e^{-lambda_k u} b_k beta_k h ) du ).
// Construction enforces the two existence hypotheses (finite log-moment of
// the jump measure, summable inverse eigenvalues) as hard preconditions.
// ---------------------------------------------------------------------------
class InvariantMeasureSpec {
public:
    static InvariantMeasureSpec create(const SpectralOperator& op, const CylNoiseSpec& noise) {
        if (!log_moment_finite(noise.family))
            throw HypothesisError(
                "invariant measure requires a finite log-moment: int_1^inf log(y) nu(dy) "
                "diverges for this jump measure");
        if (!eigen_sum_finite(op))
            throw HypothesisError(
                "invariant measure requires sum_k 1/lambda_k < infinity (eigenvalue growth "
                "exponent must exceed 1)");
        InvariantMeasureSpec s;
        s.family_ = noise.family;
        const int modes = std::min(op.dim, noise.n_modes);
        s.lambdas_.assign(op.lambdas.begin(), op.lambdas.begin() + modes);
        s.amps_.resize(static_cast<std::size_t>(modes));
        for (int k = 0; k < modes; ++k) s.amps_[static_cast<std::size_t>(k)] = noise.amplitude(k);
        return s;
    }

    int n_modes() const { return static_cast<int>(lambdas_.size()); }
    double lambda(int k) const { return lambdas_[static_cast<std::size_t>(k)]; }
    double amplitude(int k) const { return amps_[static_cast<std::size_t>(k)]; }
    const LevyFamily& family() const { return family_; }

    // mu_k(h); real, even, mu_k(0) = 1, |mu_k| <= 1. Closed form for the
    // stable family, adaptive quadrature after the substitution w = e^{-lambda u}
    // otherwise (integrand psi(amp h w)/w is smooth on (0, 1]).
    double cf(int mode, double h) const {
        const double lam = lambda(mode);
        const double amp = amplitude(mode);
        if (h == 0.0 || amp == 0.0) return 1.0;
        if (const auto* st = std::get_if<SymmetricAlphaStable>(&family_)) {
            const double z = std::pow(st->scale * amp * std::abs(h), st->alpha) / (st->alpha * lam);
            return std::exp(-z);
        }
        const double z = std::abs(h) * amp;
        auto integrand = [&](double w) { return char_exponent(family_, z * w) / w; };
        const double integral = quad::adaptive(integrand, 1e-14, 1.0, 1e-10) / lam;
        return std::exp(-integral);
    }

private:
    LevyFamily family_;
    std::vector<double> lambdas_;
    std::vector<double> amps_;
};

// One exact-in-law transition of the linear equation over dt:
//   X_k(t+dt) = e^{-lambda_k dt} X_k(t) + int_0^dt e^{-lambda_k (dt-s)} b_k beta_k dL^k(s).
// No time-discretization error; dt is arbitrary.
inline CoefVector ou_step(const SpectralOperator& op, const CylNoiseSpec& noise,
                          const CoefVector& x, double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw HypothesisError("ou_step needs dt > 0");
    const int modes = std::min(op.dim, noise.n_modes);
    CoefVector y(static_cast<std::size_t>(modes), 0.0);
    for (int k = 0; k < modes; ++k) {
        const double lam = op.lambdas[static_cast<std::size_t>(k)];
        const double xk = k < static_cast<int>(x.size()) ? x[static_cast<std::size_t>(k)] : 0.0;
        y[static_cast<std::size_t>(k)] =
            std::exp(-lam * dt) * xk +
            sample_ou_convolution(noise.family, lam, noise.amplitude(k), dt, rng);
    }
    return y;
}

// One draw of xi = (xi_k)_k. Compound Poisson is simulated event by event on
// [0, U_k] with e^{-lambda_k U_k} <= 1e-8; the stable draw is exact via the
// closed-form scale b_k beta_k (alpha lambda_k)^{-1/alpha}.
inline CoefVector sample_xi(const SpectralOperator& op, const CylNoiseSpec& noise,
                            RngStream& rng) {
    const InvariantMeasureSpec spec = InvariantMeasureSpec::create(op, noise); // enforces hypotheses
    const int modes = spec.n_modes();
    CoefVector v(static_cast<std::size_t>(modes), 0.0);
    for (int k = 0; k < modes; ++k) {
        const double lam = spec.lambda(k);
        const double amp = spec.amplitude(k);
        if (amp == 0.0) continue;
        if (const auto* cp = std::get_if<CompoundPoisson>(&noise.family)) {
            const double horizon = xi_truncation_horizon(lam);
            const std::uint64_t n = rng.poisson(cp->rate * horizon);
            double sum = 0.0;
            for (std::uint64_t j = 0; j < n; ++j) {
                const double tau = rng.uniform(0.0, horizon);
                sum += std::exp(-lam * tau) * cp->jumps.sample(rng);
            }
            v[static_cast<std::size_t>(k)] = amp * sum;
        } else if (const auto* st = std::get_if<SymmetricAlphaStable>(&noise.family)) {
            const double scale = st->scale * std::pow(st->alpha * lam, -1.0 / st->alpha);
            v[static_cast<std::size_t>(k)] = amp * scale * sample_standard_sas(st->alpha, rng);
        } else {
            throw UnsupportedError("slow-log-tail family supports symbolic checks only, not sampling");
        }
    }
    return v;
}

// Symbolic decision that xi takes values in H: the per-mode jump measures
// must satisfy sum_k int (1 ^ y^2) nu_k < infinity. Conservative reduction:
// cylindrical admissibility of the amplitudes plus a summable inverse
// spectrum.
inline bool check_product_measure_integrability(const SpectralOperator& op,
                                                const CylNoiseSpec& noise) {
    return admissible(noise) && eigen_sum_finite(op);
}

} // namespace levyspde
