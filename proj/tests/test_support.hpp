#pragma once

// Test-only oracles, deliberately independent of the library's quadrature and
// closed forms: plain composite Simpson plus direct Levy-measure integrals.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "levyspde/levy1d.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

// Richardson check: doubles the panel count until two estimates agree.
inline double simpson_auto(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-10) {
    int n = 64;
    double prev = simpson(f, a, b, n);
    for (int it = 0; it < 14; ++it) {
        n *= 2;
        const double cur = simpson(f, a, b, n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

// Normalization K of the symmetric alpha-stable Levy measure K |y|^{-1-alpha} dy
// reproducing psi(h) = (scale|h|)^alpha.
inline double stable_levy_constant(double alpha, double scale) {
    return std::pow(scale, alpha) * std::tgamma(1.0 + alpha) * std::sin(0.5 * levyspde::kPi * alpha) /
           levyspde::kPi;
}

// int (1 - cos(h y)) nu(dy) evaluated from the jump measure itself.
inline double psi_from_measure(const levyspde::LevyFamily& family, double h) {
    using namespace levyspde;
    if (const auto* cp = std::get_if<CompoundPoisson>(&family)) {
        const double a = cp->jumps.scale;
        if (cp->jumps.kind == JumpLawKind::rademacher) {
            // atoms rate/2 at +-a
            return cp->rate * 0.5 * ((1.0 - std::cos(h * a)) + (1.0 - std::cos(-h * a)));
        }
        // density rate/(2a) on [-a, a]
        return simpson_auto([&](double y) { return (1.0 - std::cos(h * y)) * cp->rate / (2.0 * a); },
                            -a, a);
    }
    const auto& st = std::get<SymmetricAlphaStable>(family);
    const double K = stable_levy_constant(st.alpha, st.scale);
    const double ah = std::abs(h);
    if (ah == 0.0) return 0.0;
    // 2K [ int_0^Y (1-cos(hy)) y^{-1-a} dy + int_Y^inf y^{-1-a} dy - int_Y^inf cos(hy) y^{-1-a} dy ]
    const double Y = 50.0 / ah;
    double head = 0.0;
    {
        // power series of 1 - cos on [0, y1] (exact to machine for h*y1 = 0.1),
        // then Simpson on the smooth remainder [y1, Y]
        const double y1 = 0.1 / ah;
        double fact = 1.0;
        for (int n = 1; n <= 10; ++n) {
            fact *= (2.0 * n - 1.0) * (2.0 * n);
            const double sign = (n % 2 == 1) ? 1.0 : -1.0;
            head += sign * std::pow(ah, 2.0 * n) * std::pow(y1, 2.0 * n - st.alpha) /
                    (fact * (2.0 * n - st.alpha));
        }
        head += simpson_auto(
            [&](double y) { return (1.0 - std::cos(ah * y)) * std::pow(y, -1.0 - st.alpha); }, y1, Y,
            1e-12);
    }
    const double plain_tail = std::pow(Y, -st.alpha) / st.alpha;
    // oscillatory tail: sum over half-periods (alternating, decreasing)
    double osc = 0.0;
    double z = Y;
    for (int j = 0; j < 4000; ++j) {
        const double z2 = z + kPi / ah;
        const double piece =
            simpson([&](double y) { return std::cos(ah * y) * std::pow(y, -1.0 - st.alpha); }, z, z2, 16);
        osc += piece;
        z = z2;
        if (std::abs(piece) < 1e-13 && j > 8) break;
    }
    return 2.0 * K * (head + plain_tail - osc);
}

// CF exponent of int_0^dt e^{-lambda(dt-s)} beta dL(s):
//   int_0^dt psi( e^{-lambda(dt-s)} beta h ) ds, with psi supplied externally.
inline double convolution_exponent(const std::function<double(double)>& psi, double lambda,
                                   double beta, double dt, double h) {
    return simpson_auto([&](double s) { return psi(std::exp(-lambda * (dt - s)) * beta * h); }, 0.0,
                        dt, 1e-11);
}

inline std::complex<double> empirical_cf(const std::vector<double>& xs, double h) {
    std::complex<double> acc{0.0, 0.0};
    for (double x : xs) acc += std::exp(std::complex<double>(0.0, h * x));
    return acc / static_cast<double>(xs.size());
}

} // namespace oracle
