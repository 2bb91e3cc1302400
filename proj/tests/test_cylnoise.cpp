#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levyspde/cylnoise.hpp"
#include "test_support.hpp"

using namespace levyspde;

namespace {
const LevyFamily kCP = CompoundPoisson{1.0, {JumpLawKind::rademacher, 1.0}};
const LevyFamily kStable15 = SymmetricAlphaStable{1.5, 1.0};
} // namespace

TEST_CASE("admissibility rules per family and decay") {
    CHECK(admissible(CylNoiseSpec::power(kStable15, 1.0, 0.0, 8)));       // 1.5 * 1 > 1
    CHECK_FALSE(admissible(CylNoiseSpec::power(kStable15, 0.0, 0.0, 8))); // beta_k = 1
    CHECK(admissible(CylNoiseSpec::power(kCP, 1.0, 0.0, 8)));
    CHECK_FALSE(admissible(CylNoiseSpec::power(kCP, 0.5, 0.0, 8))); // theta = 1/2 boundary
    CHECK_FALSE(admissible(CylNoiseSpec::power(SlowLogTail{1.0}, 3.0, 0.0, 8)));
}

TEST_CASE("admissibility is monotone in the decay exponent") {
    for (double alpha : {0.5, 1.0, 1.5, 1.9}) {
        bool seen_true = false;
        for (double theta = 0.0; theta <= 2.6; theta += 0.1) {
            const bool cur =
                admissible(CylNoiseSpec::power(SymmetricAlphaStable{alpha, 1.0}, theta, 0.0, 4));
            if (seen_true) CHECK(cur); // larger theta never flips true -> false
            seen_true = seen_true || cur;
        }
    }
}

TEST_CASE("untagged amplitude vectors are undecidable") {
    const auto spec = CylNoiseSpec::from_amplitudes(kCP, {1.0, 0.5, 0.25}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(admissible(spec), UndecidableError);
    CHECK_THROWS_AS(find_weight(spec), UndecidableError);
}

TEST_CASE("find_weight: identity when admissible, 9/8 for the critical stable case") {
    const auto ok = CylNoiseSpec::power(kStable15, 1.0, 0.0, 8);
    CHECK(find_weight(ok).sigma == 0.0);
    const auto flat = CylNoiseSpec::power(SymmetricAlphaStable{1.0, 1.0}, 0.0, 0.0, 8);
    const auto w = find_weight(flat);
    CHECK(w.sigma == Catch::Approx(9.0 / 8.0));
    // postcondition: the reweighted spec is admissible
    const auto rescaled = CylNoiseSpec::power(SymmetricAlphaStable{1.0, 1.0}, 0.0 + w.sigma, 0.0, 8);
    CHECK(admissible(rescaled));
    CHECK_THROWS_AS(find_weight(CylNoiseSpec::power(SlowLogTail{1.0}, 1.0, 0.0, 4)),
                    UndecidableError);
}

TEST_CASE("noise increment: zero dt, per-mode CF, cross-mode independence") {
    const auto spec = CylNoiseSpec::power(kCP, 1.0, 0.0, 4);
    RngStream rng(7, 0);
    CHECK(sample_noise_increment(spec, 0.0, rng) == CoefVector(4, 0.0));

    const int M = 40000;
    std::vector<double> mode1(M), mode2(M);
    for (int i = 0; i < M; ++i) {
        RngStream r(8, static_cast<std::uint64_t>(i));
        const auto v = sample_noise_increment(spec, 1.0, r);
        mode1[static_cast<std::size_t>(i)] = v[0];
        mode2[static_cast<std::size_t>(i)] = v[1];
    }
    const double band = 3.0 / std::sqrt(static_cast<double>(M));
    for (double h : {0.8, 1.6}) {
        const double t1 = std::exp(-char_exponent(kCP, spec.amplitude(0) * h));
        const double t2 = std::exp(-char_exponent(kCP, spec.amplitude(1) * h));
        CHECK(std::abs(oracle::empirical_cf(mode1, h) - std::complex<double>(t1, 0.0)) < band);
        CHECK(std::abs(oracle::empirical_cf(mode2, h) - std::complex<double>(t2, 0.0)) < band);
    }
    double m1 = 0, m2 = 0, c12 = 0, v1 = 0, v2 = 0;
    for (int i = 0; i < M; ++i) {
        m1 += mode1[static_cast<std::size_t>(i)];
        m2 += mode2[static_cast<std::size_t>(i)];
    }
    m1 /= M;
    m2 /= M;
    for (int i = 0; i < M; ++i) {
        const double a = mode1[static_cast<std::size_t>(i)] - m1;
        const double b = mode2[static_cast<std::size_t>(i)] - m2;
        c12 += a * b;
        v1 += a * a;
        v2 += b * b;
    }
    CHECK(std::abs(c12 / std::sqrt(v1 * v2)) < band);
}

TEST_CASE("double-sided path: anchored at zero, grid bookkeeping") {
    const auto spec = CylNoiseSpec::power(kCP, 1.0, 0.0, 3);
    RngStream rng(11, 0);
    const DoubleSidedPath path(spec, 1.0, 2.0, 0.25, rng);
    CHECK(path.steps_past() == 4);
    CHECK(path.steps_future() == 8);
    CHECK(path.time_of_step(0) == Catch::Approx(-1.0));
    CHECK(path.time_of_step(path.steps_past()) == Catch::Approx(0.0));
    for (int k = 0; k < 3; ++k) CHECK(path.value_at_boundary(k, path.steps_past()) == 0.0);
    // value telescopes over increments on both sides
    for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int i = path.steps_past(); i < path.steps_total(); ++i)
            acc += path.plain_increment(k, i);
        CHECK(path.value_at_boundary(k, path.steps_total()) == Catch::Approx(acc).margin(1e-15));
        double back = 0.0;
        for (int i = 0; i < path.steps_past(); ++i) back -= path.plain_increment(k, i);
        CHECK(path.value_at_boundary(k, 0) == Catch::Approx(back).margin(1e-15));
    }
    CHECK_THROWS_AS(DoubleSidedPath(spec, 0.3, 1.0, 0.25, rng), ConfigError); // off-grid xi
}

TEST_CASE("double-sided restriction to [0, T] matches the one-sided law") {
    const auto spec = CylNoiseSpec::power(kCP, 1.0, 0.0, 2);
    const int M = 30000;
    const double T = 1.0;
    std::vector<double> from_path(M), one_sided(M);
    for (int i = 0; i < M; ++i) {
        RngStream r(12, static_cast<std::uint64_t>(i));
        const DoubleSidedPath path(spec, 0.5, T, 0.125, r);
        from_path[static_cast<std::size_t>(i)] = path.value_at_boundary(0, path.steps_total());
        RngStream r2(13, static_cast<std::uint64_t>(i));
        one_sided[static_cast<std::size_t>(i)] = spec.amplitude(0) * sample_increment(kCP, T, r2);
    }
    const double band = 2.0 * 3.0 / std::sqrt(static_cast<double>(M));
    for (double h : {0.7, 1.5})
        CHECK(std::abs(oracle::empirical_cf(from_path, h) - oracle::empirical_cf(one_sided, h)) <
              band);
}

TEST_CASE("past and future increments are uncorrelated") {
    const auto spec = CylNoiseSpec::power(kCP, 1.0, 0.0, 1);
    const int M = 30000;
    std::vector<double> past(M), future(M);
    for (int i = 0; i < M; ++i) {
        RngStream r(14, static_cast<std::uint64_t>(i));
        const DoubleSidedPath path(spec, 1.0, 1.0, 0.5, r);
        past[static_cast<std::size_t>(i)] =
            path.value_at_boundary(0, path.steps_past()) - path.value_at_boundary(0, 0);
        future[static_cast<std::size_t>(i)] =
            path.value_at_boundary(0, path.steps_total()) - path.value_at_boundary(0, path.steps_past());
    }
    double mp = 0, mf = 0;
    for (int i = 0; i < M; ++i) {
        mp += past[static_cast<std::size_t>(i)];
        mf += future[static_cast<std::size_t>(i)];
    }
    mp /= M;
    mf /= M;
    double c = 0, vp = 0, vf = 0;
    for (int i = 0; i < M; ++i) {
        const double a = past[static_cast<std::size_t>(i)] - mp;
        const double b = future[static_cast<std::size_t>(i)] - mf;
        c += a * b;
        vp += a * a;
        vf += b * b;
    }
    CHECK(std::abs(c / std::sqrt(vp * vf)) < 3.0 / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("shared-future contract: conv_matrix is reproducible per path object") {
    for (const LevyFamily* fam : {&kCP, &kStable15}) {
        const auto spec = CylNoiseSpec::power(*fam, 1.0, 0.0, 3);
        RngStream rng(15, 3);
        const DoubleSidedPath path(spec, 0.5, 0.5, 0.125, rng);
        const std::vector<double> lambdas{1.0, 4.0, 9.0};
        const auto a = path.conv_matrix(lambdas);
        const auto b = path.conv_matrix(lambdas);
        CHECK(a == b);
    }
}

TEST_CASE("per-step convolution increments match the quadrature CF law") {
    // one mode, compare conv increments over a step against the closed CF
    const auto spec = CylNoiseSpec::power(kCP, 0.0, 0.0, 1); // amplitude 1
    const double dt = 0.5, lambda = 2.0;
    const int M = 40000;
    std::vector<double> xs(M);
    for (int i = 0; i < M; ++i) {
        RngStream r(16, static_cast<std::uint64_t>(i));
        const DoubleSidedPath path(spec, 0.0, dt, dt, r);
        xs[static_cast<std::size_t>(i)] = path.conv_increment(0, 0, lambda);
    }
    auto psi = [&](double h) { return char_exponent(kCP, h); };
    for (double h : {1.0, 2.0}) {
        const double target = std::exp(-oracle::convolution_exponent(psi, lambda, 1.0, dt, h));
        CHECK(std::abs(oracle::empirical_cf(xs, h) - std::complex<double>(target, 0.0)) <
              3.0 / std::sqrt(static_cast<double>(M)));
    }
}
