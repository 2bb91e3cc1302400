#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "levyspde/errors.hpp"

namespace levyspde {

// Scalar sample set standing in for a law.
struct EmpiricalMeasure {
    std::vector<double> samples;

    int count() const { return static_cast<int>(samples.size()); }
};

// (1/M) sum_j e^{i h x_j}; componentwise standard error <= 1/sqrt(M).
inline std::complex<double> empirical_cf(const EmpiricalMeasure& m, double h) {
    if (m.count() < 2) throw HypothesisError("empirical CF needs at least two samples");
    double re = 0.0, im = 0.0;
    for (double x : m.samples) {
        re += std::cos(h * x);
        im += std::sin(h * x);
    }
    const double inv = 1.0 / m.count();
    return {re * inv, im * inv};
}

// Monte Carlo band used throughout: 3 standard errors of an empirical CF.
inline double cf_band(int n_samples) { return 3.0 / std::sqrt(static_cast<double>(n_samples)); }

struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Two-sample Kolmogorov-Smirnov: sup distance of the empirical CDFs against
// the asymptotic 95% threshold 1.36 sqrt((Ma+Mb)/(Ma Mb)).
inline KsResult ks_two_sample(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.count() < 1 || b.count() < 1) throw HypothesisError("KS test needs nonempty samples");
    std::vector<double> sa = a.samples, sb = b.samples;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.threshold = 1.36 * std::sqrt((na + nb) / (na * nb));
    r.pass = d < r.threshold;
    return r;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least-squares line through (t_i, log v_i); the slope estimates the decay
// exponent. Needs at least three usable points.
inline LineFit decay_rate_fit(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size())
        throw HypothesisError("decay fit needs matching time/value lengths");
    std::vector<double> t, y;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 0.0 && std::isfinite(values[i])) {
            t.push_back(times[i]);
            y.push_back(std::log(values[i]));
        }
    }
    const std::size_t n = t.size();
    if (n < 3) throw HypothesisError("decay fit needs at least three positive values");
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
        syy += y[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double denom = nn * stt - st * st;
    if (denom == 0.0) throw HypothesisError("decay fit needs distinct times");
    LineFit f;
    f.slope = (nn * sty - st * sy) / denom;
    f.intercept = (sy - f.slope * st) / nn;
    double ss_res = 0.0;
    const double ybar = sy / nn;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * t[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_stderr(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(s2 / (n - 1.0) / n);
}

} // namespace levyspde
