#include <rampfe/backtest.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace rampfe;

namespace {
std::vector<double> normal_series(std::mt19937_64& gen, std::size_t n, double mean, double sd) {
    std::normal_distribution<double> z(mean, sd);
    std::vector<double> x(n);
    for (auto& v : x)
        v = z(gen);
    return x;
}
} // namespace

TEST(EstimateInterval, Errors) {
    try {
        estimate_interval({{0.01, 0.01, 0.01, 0.01}, 1.0}, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroDispersion);
    }
    try {
        estimate_interval({{0.01, 0.02}, 1.0}, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
}

TEST(EstimateInterval, CenteredWhenMeanEqualsRate) {
    const double r = 0.03;
    const auto iv = estimate_interval({{r - 0.1, r, r + 0.1, r - 0.05, r + 0.05}, 1.0}, r);
    EXPECT_NEAR(iv.point_estimate, 0.0, 1e-15);
    EXPECT_NEAR(iv.lower, -iv.upper, 1e-15);
    EXPECT_LE(iv.lower, iv.point_estimate);
    EXPECT_LE(iv.point_estimate, iv.upper);
}

TEST(EstimateInterval, HalfWidthAndAnnualization) {
    std::mt19937_64 gen(1);
    const auto x = normal_series(gen, 400, 0.01, 0.05);
    const auto iv = estimate_interval({x, 1.0 / 12.0}, 0.02, 0.95);
    EXPECT_NEAR(iv.upper - iv.lower, 2.0 * 1.959963984540054 / std::sqrt(400.0 / 12.0), 1e-12);
    const double mu = mean(x) * 12.0, sd = standard_deviation(x) * std::sqrt(12.0);
    EXPECT_NEAR(iv.point_estimate, (mu - 0.02) / sd, 1e-12);
}

TEST(EstimateInterval, TranslationInvariance) {
    std::mt19937_64 gen(2);
    auto x = normal_series(gen, 100, 0.02, 0.1);
    const auto base = estimate_interval({x, 1.0}, 0.01);
    for (auto& v : x)
        v += 0.37;
    const auto moved = estimate_interval({x, 1.0}, 0.01 + 0.37);
    EXPECT_NEAR(moved.lower, base.lower, 1e-12);
    EXPECT_NEAR(moved.upper, base.upper, 1e-12);
    EXPECT_NEAR(moved.point_estimate, base.point_estimate, 1e-12);
}

TEST(EstimateInterval, WidthShrinksWithSampleSize) {
    std::mt19937_64 gen(3);
    double prev = INFINITY;
    for (std::size_t n : {20u, 80u, 320u, 1280u}) {
        double width = 0.0;
        for (int trial = 0; trial < 100; ++trial)
            width += [&] {
                const auto iv = estimate_interval({normal_series(gen, n, 0.01, 0.05), 1.0}, 0.0);
                return iv.upper - iv.lower;
            }();
        EXPECT_LT(width / 100.0, prev);
        prev = width / 100.0;
    }
}

TEST(ConsistencyCheck, Examples) {
    const PriceOfRiskInterval iv{0.1, 0.4, 0.25, 0.95};
    EXPECT_EQ(consistency_check(0.2, iv), Consistency::Consistent);
    EXPECT_EQ(consistency_check(0.4, iv), Consistency::Consistent);
    EXPECT_EQ(consistency_check(0.1, iv), Consistency::Consistent);
    EXPECT_EQ(consistency_check(0.0, iv), Consistency::InconsistentBelow);
    EXPECT_EQ(consistency_check(0.5, iv), Consistency::InconsistentAbove);
    EXPECT_THROW(consistency_check(0.0, PriceOfRiskInterval{0.5, 0.1, 0.3, 0.95}), Error);
}

TEST(ConsistencyCheck, ZeroExcludedExactlyWhenOutsideInterval) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 500; ++trial) {
        const auto iv = estimate_interval({normal_series(gen, 60, 0.01, 0.04), 1.0}, 0.0);
        const bool outside = 0.0 < iv.lower || 0.0 > iv.upper;
        EXPECT_EQ(consistency_check(0.0, iv) != Consistency::Consistent, outside);
    }
}

TEST(EstimateInterval, HalfWidthScalesWithSpanInYears) {
    std::mt19937_64 gen(17);
    const auto x = normal_series(gen, 240, 0.005, 0.04);
    const auto monthly = estimate_interval({x, 1.0 / 12.0}, 0.01);
    const double z = oracle::normal_quantile(0.975);
    EXPECT_NEAR(monthly.upper - monthly.point_estimate, z / std::sqrt(20.0), 1e-12);
    EXPECT_NEAR(monthly.point_estimate - monthly.lower, z / std::sqrt(20.0), 1e-12);
    const auto annual = estimate_interval({x, 1.0}, 0.01);
    EXPECT_NEAR(annual.upper - annual.lower, 2.0 * z / std::sqrt(240.0), 1e-12);
}
