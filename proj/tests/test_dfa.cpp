#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lrdkit/dfa.hpp"
#include "lrdkit/synth.hpp"
#include "oracles.hpp"

using namespace lrdkit;

TEST(DfaFluctuation, ConstantSeriesIsZero) {
    const std::vector<double> c(64, 3.0);
    for (std::size_t s : {4u, 8u, 16u, 32u}) EXPECT_EQ(dfa_fluctuation(c, s), 0.0);
}

TEST(DfaFluctuation, SawtoothMatchesOracle) {
    const std::vector<double> x{1, -1, 1, -1, 1, -1, 1, -1};
    EXPECT_NEAR(dfa_fluctuation(x, 4), oracle::dfa_fluctuation(x, 4), 1e-14);
    // profile 0.5,-0.5,... on i=1..4 around its fitted line
    EXPECT_NEAR(dfa_fluctuation(x, 4), std::sqrt(0.2), 1e-14);
}

TEST(DfaFluctuation, MatchesOracleOnRandomSeries) {
    for (unsigned seed = 0; seed < 50; ++seed) {
        const std::size_t n = 100 + (seed * 173) % 901;
        const auto x = oracle::random_series(n, seed, 1.0 + seed);
        for (std::size_t s : {4ul, 7ul, 10ul, 16ul, 25ul, n / 4, n / 2}) {
            const double got = dfa_fluctuation(x, s);
            const double want = oracle::dfa_fluctuation(x, s);
            EXPECT_NEAR(got, want, 1e-9 * want) << "n=" << n << " s=" << s;
        }
    }
}

TEST(DfaFluctuation, ScaleOutOfRange) {
    const auto x = oracle::random_series(100, 1);
    EXPECT_THROW(dfa_fluctuation(x, 3), InvalidInput);
    EXPECT_THROW(dfa_fluctuation(x, 51), InvalidInput);
    EXPECT_NO_THROW(dfa_fluctuation(x, 50));
}

TEST(DfaFluctuationFunction, BoxesAndOrdering) {
    const auto x = oracle::random_series(230, 2);
    const std::vector<std::size_t> scales{10, 23, 50};
    const auto f = dfa_fluctuation_function(x, scales);
    EXPECT_EQ(f.boxes_per_scale, (std::vector<std::size_t>{46, 20, 8}));
    for (std::size_t i = 0; i < scales.size(); ++i) {
        EXPECT_EQ(f.values[i], dfa_fluctuation(x, scales[i]));
        EXPECT_GE(f.values[i], 0.0);
    }
    const std::vector<std::size_t> bad{10, 10};
    EXPECT_THROW(dfa_fluctuation_function(x, bad), InvalidInput);
}

TEST(DfaScaleGrid, DecadeSteps) {
    EXPECT_EQ(dfa_scale_grid(10, 100),
              (std::vector<std::size_t>{10, 12, 15, 19, 25, 31, 39, 50, 63, 79, 100}));
    const auto g = dfa_scale_grid(10, 500);
    EXPECT_EQ(g.front(), 10u);
    EXPECT_EQ(g.back(), 398u);
    EXPECT_EQ(g.size(), 17u);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
    // integer collisions at small scales collapse
    const auto small = dfa_scale_grid(4, 10);
    for (std::size_t i = 1; i < small.size(); ++i) EXPECT_LT(small[i - 1], small[i]);
    EXPECT_THROW(dfa_scale_grid(10, 5), InvalidInput);
}

TEST(DfaHurst, Errors) {
    EXPECT_THROW(dfa_hurst(oracle::random_series(49, 1)), InvalidInput);
    EXPECT_THROW(dfa_hurst(oracle::random_series(100, 1)), InvalidInput);  // grid 10..20
    EXPECT_THROW(dfa_hurst(std::vector<double>(1000, 1.0)), DegenerateScale);
}

TEST(DfaHurst, UsesDefaultScaleRange) {
    const auto x = oracle::random_series(4000, 3);
    const auto h = dfa_hurst(x);
    EXPECT_EQ(h.scales_used.scales.front(), 10u);
    EXPECT_LE(h.scales_used.scales.back(), 500u);
    EXPECT_EQ(h.scales_used.scales, dfa_scale_grid(10, 500));
    EXPECT_GE(h.r_squared, 0.0);
    EXPECT_LE(h.r_squared, 1.0);
    const auto h2 = dfa_hurst(oracle::random_series(1000, 3));
    EXPECT_EQ(h2.scales_used.scales.back(), 199u);
}

TEST(DfaHurst, AffineInvariance) {
    for (unsigned seed = 0; seed < 10; ++seed) {
        const auto x = oracle::random_series(2000, seed);
        const auto base = dfa_hurst(x);
        for (auto [a, b] : {std::pair{2.0, 0.0}, std::pair{-0.3, 9.0}, std::pair{1e4, -5.0}}) {
            std::vector<double> y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
            const auto est = dfa_hurst(y);
            EXPECT_NEAR(est.h, base.h, 1e-10);
            EXPECT_NEAR(est.intercept, base.intercept + std::log10(std::abs(a)), 1e-9);
        }
    }
}

TEST(DfaHurst, DoublingShiftsInterceptByLogTwo) {
    const auto x = oracle::random_series(3000, 77);
    auto y = x;
    for (auto& v : y) v *= 2.0;
    const auto a = dfa_hurst(x);
    const auto b = dfa_hurst(y);
    EXPECT_NEAR(b.h, a.h, 1e-12);
    EXPECT_NEAR(b.intercept - a.intercept, std::log10(2.0), 1e-12);
}

TEST(DfaHurst, WhiteNoiseNearHalf) {
    double acc = 0.0;
    for (unsigned seed = 0; seed < 50; ++seed) acc += dfa_hurst(generate_white_noise(8192, seed).values).h;
    EXPECT_NEAR(acc / 50.0, 0.5, 0.04);
}

TEST(DfaHurst, FgnRecovery) {
    for (double h : {0.3, 0.5, 0.7, 0.8, 0.9}) {
        double acc = 0.0;
        for (unsigned seed = 0; seed < 50; ++seed) acc += dfa_hurst(generate_fgn({h, 8192, seed, 1.0}).values).h;
        EXPECT_NEAR(acc / 50.0, h, 0.05) << "H=" << h;
    }
}

TEST(DfaHurst, CumulationRaisesExponentByOne) {
    for (unsigned seed = 0; seed < 10; ++seed) {
        const auto x = generate_white_noise(8192, 900 + seed).values;
        std::vector<double> walk(x.size());
        std::partial_sum(x.begin(), x.end(), walk.begin());
        const double diff = dfa_hurst(walk).h - dfa_hurst(x).h;
        EXPECT_GE(diff, 0.85);
        EXPECT_LE(diff, 1.15);
    }
}
