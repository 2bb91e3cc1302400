#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "levyspde/errors.hpp"

namespace levyspde {

// Dense real polynomial, ascending coefficients: c[0] + c[1] x + ... + c[n] x^n.
struct Poly {
    std::vector<double> coeffs;

    int degree() const {
        int d = static_cast<int>(coeffs.size()) - 1;
        while (d > 0 && coeffs[static_cast<std::size_t>(d)] == 0.0) --d;
        return d;
    }
    double leading() const { return coeffs[static_cast<std::size_t>(degree())]; }
};

inline double poly_eval(const Poly& p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.coeffs.size(); i-- > 0;) acc = acc * x + p.coeffs[i];
    return acc;
}

inline Poly poly_derive(const Poly& p) {
    if (p.coeffs.size() <= 1) return Poly{{0.0}};
    Poly d;
    d.coeffs.resize(p.coeffs.size() - 1);
    for (std::size_t i = 1; i < p.coeffs.size(); ++i)
        d.coeffs[i - 1] = static_cast<double>(i) * p.coeffs[i];
    return d;
}

namespace detail {

// All real roots have absolute value below 1 + max|c_i|/|c_n| (Cauchy bound).
inline double cauchy_bound(const Poly& p) {
    const int n = p.degree();
    const double lead = std::abs(p.coeffs[static_cast<std::size_t>(n)]);
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(p.coeffs[static_cast<std::size_t>(i)]));
    return 1.0 + m / lead;
}

// Bisection with Newton polish on a bracketing interval (p monotone inside).
inline double refine_root(const Poly& p, const Poly& dp, double lo, double hi) {
    double flo = poly_eval(p, lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = poly_eval(p, mid);
        if (fmid == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) {
            lo = hi = mid;
            break;
        }
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double d = poly_eval(dp, x);
        if (d == 0.0) break;
        x -= poly_eval(p, x) / d;
    }
    return x;
}

} // namespace detail

// Real roots in ascending order, found recursively: roots of p' split the line
// into monotone intervals, each holding at most one sign change.
inline std::vector<double> poly_real_roots(const Poly& p) {
    const int n = p.degree();
    if (n == 0) return {};
    if (n == 1) return {-p.coeffs[0] / p.coeffs[1]};
    const Poly dp = poly_derive(p);
    std::vector<double> crit = poly_real_roots(dp);
    std::sort(crit.begin(), crit.end());
    const double bound = detail::cauchy_bound(p);
    std::vector<double> edges;
    edges.push_back(-bound);
    for (double c : crit)
        if (c > -bound && c < bound) edges.push_back(c);
    edges.push_back(bound);
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        const double fa = poly_eval(p, a), fb = poly_eval(p, b);
        if (fa == 0.0) roots.push_back(a);
        if ((fa < 0.0) != (fb < 0.0)) roots.push_back(detail::refine_root(p, dp, a, b));
    }
    if (!roots.empty() && poly_eval(p, edges.back()) == 0.0) roots.push_back(edges.back());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                roots.end());
    return roots;
}

// Global maximum over the reals of an even-degree polynomial with negative
// leading coefficient (attained at a critical point). Degree-0 input is its
// constant value.
inline double poly_max_over_reals(const Poly& p) {
    const int n = p.degree();
    if (n == 0) return p.coeffs[0];
    if (n % 2 != 0 || p.leading() >= 0.0)
        throw NumericError("polynomial is unbounded above on the reals");
    double best = -std::numeric_limits<double>::infinity();
    for (double c : poly_real_roots(poly_derive(p))) best = std::max(best, poly_eval(p, c));
    return best;
}

} // namespace levyspde
