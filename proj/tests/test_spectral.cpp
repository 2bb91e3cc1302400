#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyspde/rng.hpp"
#include "levyspde/spectral.hpp"

using namespace levyspde;

namespace {
CoefVector random_vector(int n, std::uint64_t seed) {
    RngStream rng(seed, 0);
    CoefVector x(static_cast<std::size_t>(n));
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    return x;
}
} // namespace

TEST_CASE("dirichlet laplacian eigenvalues") {
    const auto op = make_dirichlet_laplacian(4, 1.0);
    CHECK(op.lambdas[0] == Catch::Approx(kPi * kPi).epsilon(1e-14));
    CHECK(op.lambdas[1] == Catch::Approx(4.0 * kPi * kPi).epsilon(1e-14));
    CHECK(op.lambdas[2] == Catch::Approx(9.0 * kPi * kPi).epsilon(1e-14));
    CHECK(op.lambdas[3] == Catch::Approx(16.0 * kPi * kPi).epsilon(1e-14));
    CHECK(op.omega == Catch::Approx(op.lambdas[0]));

    const auto op2 = make_dirichlet_laplacian(8, 2.0);
    CHECK(op2.lambdas[0] == Catch::Approx(kPi * kPi / 4.0).epsilon(1e-14));

    const auto single = make_dirichlet_laplacian(1, 3.0);
    CHECK(single.omega == Catch::Approx(single.lambdas[0]));

    CHECK_THROWS_AS(make_dirichlet_laplacian(0, 1.0), ConfigError);
}

TEST_CASE("lambdas agree with the growth law to relative 1e-12") {
    for (const auto& op : {make_dirichlet_laplacian(16, 0.7),
                           make_shifted_neumann_laplacian(16, 1.3, 0.25),
                           make_synthetic_operator(16, 2.0, 1.5)}) {
        for (int k = 1; k <= op.dim; ++k)
            CHECK(op.lambdas[static_cast<std::size_t>(k - 1)] ==
                  Catch::Approx(op.law.eval(k)).epsilon(1e-12));
        CHECK(op.lambdas.front() > 0.0);
    }
}

TEST_CASE("shifted neumann starts at the shift") {
    const auto op = make_shifted_neumann_laplacian(4, 1.0, 0.5);
    CHECK(op.lambdas[0] == Catch::Approx(0.5));
    CHECK(op.lambdas[1] == Catch::Approx(kPi * kPi + 0.5));
    CHECK(op.omega == Catch::Approx(0.5));
    CHECK_THROWS_AS(make_shifted_neumann_laplacian(4, 1.0, 0.0), ConfigError);
}

TEST_CASE("semigroup: identity at t = 0, linear zero, scalar exponential") {
    const auto op = make_dirichlet_laplacian(8, 1.0);
    const auto x = random_vector(8, 5);
    CHECK(semigroup_apply(op, 0.0, x) == x);
    CHECK(semigroup_apply(op, 2.0, CoefVector(8, 0.0)) == CoefVector(8, 0.0));

    const auto one = make_dirichlet_laplacian(1, 1.0);
    const auto y = semigroup_apply(one, 1.0 / (kPi * kPi), CoefVector{1.0});
    CHECK(y[0] == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));

    CHECK_THROWS_AS(semigroup_apply(op, -0.1, x), HypothesisError);
}

TEST_CASE("semigroup flow property and decay bound") {
    const auto op = make_dirichlet_laplacian(8, 1.0);
    RngStream rng(9, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double s = rng.uniform(0.0, 0.3), t = rng.uniform(0.0, 0.3);
        const auto x = random_vector(8, 100 + static_cast<std::uint64_t>(trial));
        const auto two_step = semigroup_apply(op, s, semigroup_apply(op, t, x));
        const auto one_step = semigroup_apply(op, s + t, x);
        for (int k = 0; k < 8; ++k)
            CHECK(two_step[static_cast<std::size_t>(k)] ==
                  Catch::Approx(one_step[static_cast<std::size_t>(k)]).margin(1e-12));
        CHECK(l2_norm(semigroup_apply(op, t, x)) <= std::exp(-op.omega * t) * l2_norm(x) + 1e-12);
    }
}

TEST_CASE("projection: full, idempotent, contractive, commutes with semigroup") {
    const auto op = make_dirichlet_laplacian(8, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_vector(8, 200 + static_cast<std::uint64_t>(trial));
        CHECK(project(x, 8) == x);
        CHECK(project(x, 12) == x);
        CHECK(project(project(x, 5), 5) == project(x, 5));
        CHECK(l2_norm(project(x, 3)) <= l2_norm(x));
        const auto a = project(semigroup_apply(op, 0.1, x), 4);
        const auto b = semigroup_apply(op, 0.1, project(x, 4));
        for (int k = 0; k < 8; ++k)
            CHECK(a[static_cast<std::size_t>(k)] ==
                  Catch::Approx(b[static_cast<std::size_t>(k)]).margin(1e-15));
    }
    CHECK(project(random_vector(4, 1), 0) == CoefVector(4, 0.0));
}

TEST_CASE("eigen sum finiteness is a growth-law decision") {
    CHECK(eigen_sum_finite(make_dirichlet_laplacian(4, 1.0)));
    CHECK(eigen_sum_finite(make_dirichlet_laplacian(1, 1.0))); // single mode, gamma = 2
    CHECK_FALSE(eigen_sum_finite(make_synthetic_operator(4, 1.0, 1.0)));
    CHECK(eigen_sum_finite(make_synthetic_operator(4, 3.0, 1.01)));
}

TEST_CASE("dirichlet inverse-eigenvalue sum tends to 1/6") {
    // sum_k 1/(pi^2 k^2) = 1/6; partial sum plus integral tail bound
    double partial = 0.0;
    const int K = 200000;
    for (int k = 1; k <= K; ++k) partial += 1.0 / (kPi * kPi * k * k);
    const double tail_mid = 1.0 / (kPi * kPi * (K + 0.5));
    CHECK(partial + tail_mid == Catch::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("power weights are positive and decay") {
    const auto w = make_power_weight(1.125, 6);
    CHECK(w.sigma == Catch::Approx(1.125));
    for (std::size_t k = 0; k < 6; ++k) CHECK(w.rhos[k] > 0.0);
    CHECK(w.rhos[5] < w.rhos[0]);
    CHECK(w.rhos[1] == Catch::Approx(std::pow(2.0, -1.125)));
}
