#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "levyspde/errors.hpp"

namespace levyspde {
inline constexpr double kPi = 3.14159265358979323846;
}

namespace levyspde::quad {

struct PanelResult {
    double value;
    double error;
};

// 15-point Gauss-Kronrod rule with embedded 7-point Gauss error estimate.
// Node/weight table as in QUADPACK's dqk15.
template <class F>
PanelResult gk15(F&& f, double a, double b) {
    static const double xgk[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
    static const double wgk[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
    static const double wg[4] = {
        0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = wg[3] * fc;
    double result_kronrod = wgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * xgk[i];
        const double fsum = f(center - dx) + f(center + dx);
        result_kronrod += wgk[i] * fsum;
        if (i % 2 == 1) result_gauss += wg[i / 2] * fsum;
    }
    result_kronrod *= half;
    result_gauss *= half;
    return {result_kronrod, std::abs(result_kronrod - result_gauss)};
}

// Globally adaptive bisection on [a, b] to absolute tolerance abs_tol.
template <class F>
double adaptive(F&& f, double a, double b, double abs_tol, int max_panels = 4000) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    if (a == b) return 0.0;
    std::priority_queue<Panel> heap;
    PanelResult r0 = gk15(f, a, b);
    heap.push({a, b, r0.value, r0.error});
    double total_value = r0.value;
    double total_error = r0.error;
    int panels = 1;
    while (total_error > abs_tol) {
        if (panels >= max_panels)
            throw NumericError("adaptive quadrature failed to converge (possibly divergent integral)");
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        PanelResult left = gk15(f, worst.a, mid);
        PanelResult right = gk15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.value, left.error});
        heap.push({mid, worst.b, right.value, right.error});
        ++panels;
    }
    return total_value;
}

// Tail integral of an oscillatory integrand whose sign alternates between the
// break points z_j = first_break + j*spacing:  sum_j \int_{z_j}^{z_{j+1}} f.
// The alternating partial sums are accelerated by iterated pair averaging
// (Euler transformation); the integrand must decay monotonically in envelope.
template <class F>
double alternating_tail(F&& f, double first_break, double spacing, double abs_tol,
                        int max_terms = 120) {
    std::vector<double> partial;
    partial.reserve(max_terms);
    double sum = 0.0;
    double accepted = 0.0;
    double prev_estimate = 0.0;
    for (int j = 0; j < max_terms; ++j) {
        const double za = first_break + j * spacing;
        const double zb = za + spacing;
        sum += gk15(f, za, zb).value;
        partial.push_back(sum);
        if (j < 3) continue;
        // Euler transform: repeatedly average adjacent partial sums.
        std::vector<double> row = partial;
        while (row.size() > 1) {
            for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
            row.pop_back();
        }
        accepted = row[0];
        if (j > 4 && std::abs(accepted - prev_estimate) < 0.5 * abs_tol) return accepted;
        prev_estimate = accepted;
    }
    if (std::abs(accepted - prev_estimate) > abs_tol)
        throw NumericError("alternating tail acceleration failed to converge");
    return accepted;
}

} // namespace levyspde::quad
