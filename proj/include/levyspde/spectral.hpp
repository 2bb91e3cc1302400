#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "levyspde/errors.hpp"
#include "levyspde/levy1d.hpp"

namespace levyspde {

// Coefficients in the eigenbasis of -A (identification of H with little-l2).
using CoefVector = std::vector<double>;

inline double l2_norm(const CoefVector& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Symbolic eigenvalue growth law lambda(k) = c * (k - k_offset)^gamma + shift.
// Series decisions (p-series tests) are made on gamma, never on a truncation.
struct GrowthLaw {
    double c = 1.0;
    double gamma = 2.0;
    double shift = 0.0;
    double k_offset = 0.0;

    double eval(int k) const {
        return c * std::pow(static_cast<double>(k) - k_offset, gamma) + shift;
    }
};

// Diagonal self-adjoint strictly negative operator A with eigenvalues -lambda_k,
// 0 < lambda_1 <= ... <= lambda_N increasing to infinity under the growth law.
// omega = lambda_1 is the spectral gap.
struct SpectralOperator {
    int dim = 0;
    std::vector<double> lambdas;
    GrowthLaw law;
    double omega = 0.0;
    double length = 1.0; // domain length of the sine eigenbasis
    std::string kind;
};

namespace detail {

inline SpectralOperator make_operator(int dim, const GrowthLaw& law, std::string kind,
                                      double length = 1.0) {
    if (dim < 1) throw ConfigError("operator truncation must have at least one mode");
    SpectralOperator op;
    op.dim = dim;
    op.law = law;
    op.length = length;
    op.kind = std::move(kind);
    op.lambdas.resize(static_cast<std::size_t>(dim));
    double prev = 0.0;
    for (int k = 1; k <= dim; ++k) {
        const double l = law.eval(k);
        if (!(l > 0.0)) throw ConfigError("operator eigenvalues must be strictly positive");
        if (l < prev) throw ConfigError("operator eigenvalues must be nondecreasing");
        op.lambdas[static_cast<std::size_t>(k - 1)] = l;
        prev = l;
    }
    op.omega = op.lambdas.front();
    return op;
}

} // namespace detail

// lambda_k = (pi k / length)^2 on the interval (0, length), homogeneous
// boundary values.
inline SpectralOperator make_dirichlet_laplacian(int dim, double length) {
    if (!(length > 0.0)) throw ConfigError("domain length must be positive");
    const double c = kPi * kPi / (length * length);
    return detail::make_operator(dim, GrowthLaw{c, 2.0, 0.0, 0.0}, "dirichlet", length);
}

// Neumann spectrum (pi (k-1)/length)^2 shifted by delta > 0 so the operator
// stays strictly negative; omega = delta.
inline SpectralOperator make_shifted_neumann_laplacian(int dim, double length, double delta) {
    if (!(length > 0.0)) throw ConfigError("domain length must be positive");
    if (!(delta > 0.0))
        throw ConfigError("shifted-Neumann operator needs shift > 0 (plain Neumann has a zero eigenvalue)");
    const double c = kPi * kPi / (length * length);
    return detail::make_operator(dim, GrowthLaw{c, 2.0, delta, 1.0}, "shifted_neumann", length);
}

// lambda_k = c * k^gamma; negative-control operator for series hypotheses.
inline SpectralOperator make_synthetic_operator(int dim, double c, double gamma) {
    if (!(c > 0.0) || !(gamma > 0.0)) throw ConfigError("synthetic operator needs c > 0, gamma > 0");
    return detail::make_operator(dim, GrowthLaw{c, gamma, 0.0, 0.0}, "synthetic");
}

// e^{tA} x, coordinatewise e^{-lambda_k t} x_k; contraction for t >= 0.
inline CoefVector semigroup_apply(const SpectralOperator& op, double t, const CoefVector& x) {
    if (t < 0.0) throw HypothesisError("semigroup is defined for t >= 0 only");
    CoefVector y(x.size());
    for (std::size_t k = 0; k < x.size() && k < op.lambdas.size(); ++k)
        y[k] = std::exp(-op.lambdas[k] * t) * x[k];
    return y;
}

// Galerkin projection onto the first n modes; idempotent orthogonal projection.
inline CoefVector project(const CoefVector& x, int n) {
    if (n < 0) throw HypothesisError("projection mode count must be nonnegative");
    CoefVector y = x;
    for (std::size_t k = static_cast<std::size_t>(n); k < y.size(); ++k) y[k] = 0.0;
    return y;
}

// True iff sum_k 1/lambda_k converges, i.e. gamma > 1 (p-series, independent
// of the truncation).
inline bool eigen_sum_finite(const SpectralOperator& op) {
    return op.law.gamma > 1.0;
}

// Positive weight sequence rho_k = k^{-sigma} with its symbolic decay exponent.
struct WeightSequence {
    double sigma = 0.0;
    std::vector<double> rhos;
};

inline WeightSequence make_power_weight(double sigma, int n_modes) {
    WeightSequence w;
    w.sigma = sigma;
    w.rhos.resize(static_cast<std::size_t>(n_modes));
    for (int k = 1; k <= n_modes; ++k)
        w.rhos[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -sigma);
    return w;
}

} // namespace levyspde
