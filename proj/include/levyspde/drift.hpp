#pragma once

#include <cmath>
#include <vector>

#include "levyspde/errors.hpp"
#include "levyspde/polynomial.hpp"
#include "levyspde/spectral.hpp"

namespace levyspde {

// One-sided Lipschitz constant of the Nemytskii map u -> g(u): eta = sup g'.
// Requires a dissipative polynomial (odd degree, negative leading coefficient),
// so g' is even with negative leading coefficient and the sup is attained.
inline double one_sided_constant(const Poly& g) {
    const int deg = g.degree();
    if (deg < 1 || deg % 2 == 0 || g.leading() >= 0.0)
        throw ConfigError(
            "drift polynomial must have odd degree and a strictly negative leading coefficient");
    return poly_max_over_reals(poly_derive(g));
}

// Pointwise polynomial drift F(u)(x) = g(u(x)) and its one-sided constant.
struct DriftSpec {
    Poly g;
    double eta = 0.0;
    int oversampling = 4;
};

inline DriftSpec make_drift(std::vector<double> coeffs, int oversampling = 4) {
    if (oversampling < 1) throw ConfigError("grid oversampling must be >= 1");
    DriftSpec d;
    d.g = Poly{std::move(coeffs)};
    d.eta = one_sided_constant(d.g);
    d.oversampling = oversampling;
    return d;
}

// ---------------------------------------------------------------------------
// Collocation transform between eigencoefficients and grid values of
// sum_k x_k e_k with e_k(s) = sqrt(2/L) sin(k pi s / L), on the interior grid
// s_i = i L/(G+1). The discrete sine orthogonality
//   sum_i sin(k pi i/(G+1)) sin(j pi i/(G+1)) = (G+1)/2 delta_kj,  k,j <= G,
// makes inverse∘forward the exact identity, and the collocation projection of
// g(u) agrees with the L2 projection to machine precision on modes <= N as
// long as G >= 4N and deg g <= 7 (no alias lands below mode N).
// ---------------------------------------------------------------------------
class CollocationMap {
public:
    static CollocationMap dirichlet_sine(int n_coef, int oversampling, double length = 1.0) {
        if (n_coef < 1) throw ConfigError("collocation map needs at least one mode");
        CollocationMap m;
        m.n_coef_ = n_coef;
        m.n_grid_ = oversampling * n_coef;
        m.length_ = length;
        const int G = m.n_grid_;
        m.grid_.resize(static_cast<std::size_t>(G));
        m.forward_.resize(static_cast<std::size_t>(G) * static_cast<std::size_t>(n_coef));
        const double norm = std::sqrt(2.0 / length);
        for (int i = 1; i <= G; ++i) {
            m.grid_[static_cast<std::size_t>(i - 1)] = length * i / (G + 1);
            for (int k = 1; k <= n_coef; ++k)
                m.forward_[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_coef) +
                           static_cast<std::size_t>(k - 1)] =
                    norm * std::sin(kPi * k * i / (G + 1));
        }
        m.inv_factor_ = length / (G + 1); // (2/(G+1)) * (L/2), the discrete <.,e_k> weight
        return m;
    }

    int n_coef() const { return n_coef_; }
    int n_grid() const { return n_grid_; }
    const std::vector<double>& grid_points() const { return grid_; }

    void to_grid(const CoefVector& coefs, std::vector<double>& values) const {
        values.assign(static_cast<std::size_t>(n_grid_), 0.0);
        const int n = std::min<int>(n_coef_, static_cast<int>(coefs.size()));
        for (int i = 0; i < n_grid_; ++i) {
            double acc = 0.0;
            const double* row = &forward_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_coef_)];
            for (int k = 0; k < n; ++k) acc += row[k] * coefs[static_cast<std::size_t>(k)];
            values[static_cast<std::size_t>(i)] = acc;
        }
    }

    void to_coefs(const std::vector<double>& values, CoefVector& coefs) const {
        coefs.assign(static_cast<std::size_t>(n_coef_), 0.0);
        for (int i = 0; i < n_grid_; ++i) {
            const double w = inv_factor_ * values[static_cast<std::size_t>(i)];
            const double* row = &forward_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_coef_)];
            for (int k = 0; k < n_coef_; ++k) coefs[static_cast<std::size_t>(k)] += w * row[k];
        }
    }

private:
    int n_coef_ = 0;
    int n_grid_ = 0;
    double length_ = 1.0;
    double inv_factor_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> forward_; // [grid][coef], e_k(s_i)
};

namespace detail {

template <class ScalarMap>
CoefVector apply_pointwise(const CollocationMap& map, const CoefVector& x, ScalarMap&& g_of) {
    std::vector<double> values;
    map.to_grid(x, values);
    for (double& v : values) {
        v = g_of(v);
        if (!std::isfinite(v))
            throw OverflowError("drift evaluation produced a non-finite value (time step too large?)");
    }
    CoefVector out;
    map.to_coefs(values, out);
    return out;
}

} // namespace detail

// Nemytskii drift in eigencoordinates: transform to the grid, apply g
// pointwise, transform back. Callers project the result when realizing
// Pi_n F Pi_n.
inline CoefVector apply_drift(const DriftSpec& spec, const CollocationMap& map,
                              const CoefVector& x) {
    return detail::apply_pointwise(map, x, [&](double u) { return poly_eval(spec.g, u); });
}

namespace detail {

// Root of y - g(y)/m = x; phi(y) = y - g(y)/m is strictly increasing when
// m > eta, so the root is unique. Safeguarded Newton inside a bisection
// bracket, tolerance 1e-12.
inline double resolvent_root(const Poly& g, const Poly& dg, double m, double x) {
    auto phi = [&](double y) { return y - poly_eval(g, y) / m; };
    double lo = x, hi = x, width = 1.0 + std::abs(x);
    while (phi(lo) > x) lo -= width, width *= 2.0;
    width = 1.0 + std::abs(x);
    while (phi(hi) < x) hi += width, width *= 2.0;
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = phi(y) - x;
        if (f > 0.0) hi = y; else lo = y;
        const double slope = 1.0 - poly_eval(dg, y) / m;
        double y_next = slope > 0.0 ? y - f / slope : y;
        if (!(y_next > lo && y_next < hi)) y_next = 0.5 * (lo + hi); // safeguard
        if (std::abs(y_next - y) < 1e-12 * (1.0 + std::abs(y_next))) return y_next;
        y = y_next;
    }
    return y;
}

} // namespace detail

// Scalar Yosida approximant F_m = g o J_m with resolvent J_m = (I - g/m)^{-1},
// prepared once so repeated evaluation (per grid point, per step) skips the
// m > eta validation and derivative construction.
class YosidaMap {
public:
    YosidaMap(Poly g, double m, double eta) : g_(std::move(g)), dg_(poly_derive(g_)), m_(m) {
        if (!(m > eta))
            throw HypothesisError(
                "Yosida parameter must exceed the drift's one-sided constant eta (resolvent not "
                "single-valued)");
    }
    double operator()(double x) const {
        return poly_eval(g_, detail::resolvent_root(g_, dg_, m_, x));
    }
    double resolvent(double x) const { return detail::resolvent_root(g_, dg_, m_, x); }
    double m() const { return m_; }

private:
    Poly g_;
    Poly dg_;
    double m_;
};

inline double yosida_scalar(const Poly& g, double m, double x) {
    return YosidaMap(g, m, one_sided_constant(g))(x);
}

// Pi-composed Yosida drift: apply_drift with g replaced by F_m pointwise.
inline CoefVector yosida_drift(const DriftSpec& spec, const CollocationMap& map, double m,
                               const CoefVector& x) {
    const YosidaMap fm(spec.g, m, spec.eta);
    return detail::apply_pointwise(map, x, fm);
}

} // namespace levyspde
