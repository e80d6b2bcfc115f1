#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spde_mlmc/error.hpp"
#include "spde_mlmc/fem.hpp"
#include "spde_mlmc/metrics.hpp"

using namespace spde_mlmc;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(ExactMean, Examples) {
    EXPECT_EQ(exact_mean(0.0, make_level(3)), initial_field(make_level(3)));
    EXPECT_NEAR(exact_mean_at(1.0, 0.5), std::exp(-pi * pi), 1e-18);
    EXPECT_EQ(exact_mean_at(0.3, 0.0), 0.0);
    const NodalField a = exact_mean(0.25, make_level(2)), b = exact_mean(0.5, make_level(2));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], a[i] * std::exp(-0.25 * pi * pi), 1e-15);
}

TEST(ExactMean, L2ErrorOfInterpolantIsSecondOrder) {
    std::vector<std::pair<double, double>> pts;
    for (int l = 2; l <= 8; ++l) {
        const NodalField u = exact_mean(1.0, make_level(l));
        pts.emplace_back(-l, std::log2(l2_error_to_exact_mean(u, 1.0)));
    }
    EXPECT_NEAR(fit_slope(pts), 2.0, 0.02);
    EXPECT_NEAR(l2_error_to_exact_mean(NodalField(make_level(3)), 1.0), std::exp(-pi * pi) / std::sqrt(2.0), 1e-14);
}

TEST(ReferenceGrid, Size) {
    EXPECT_EQ(reference_grid_size(3), 33u);
    EXPECT_EQ(reference_grid_size(7), 129u);
    EXPECT_THROW((void)reference_grid_size(kMaxLevel + 1), CapacityError);
}

TEST(E1, InterpolantOnItsOwnGridIsExact) {
    for (int L = 1; L <= 6; ++L) {
        EXPECT_NEAR(e1(exact_mean(1.0, make_level(L)), (std::size_t{1} << L) + 1), 0.0, 1e-17);
    }
}

TEST(E1, ZeroEstimate) {
    // sum_{k<2^r} sin^2(pi k / 2^r) = 2^(r-1).
    for (int r = 1; r <= 8; ++r) {
        const std::size_t m = (std::size_t{1} << r) + 1;
        const double expected = std::exp(-pi * pi) * std::sqrt(std::exp2(r - 1) / static_cast<double>(m));
        EXPECT_NEAR(e1(NodalField(make_level(1)), m), expected, 1e-16) << r;
    }
}

TEST(E1, FlipInvariant) {
    const NodalField f(make_level(3), {0.1, 0.2, -0.3, 0.0, 0.4, 0.5, -0.6});
    EXPECT_NEAR(e1(f, 33), e1(f.flipped(), 33), 1e-15);
}

TEST(E1, BadGridSize) {
    const NodalField f(make_level(3));
    EXPECT_THROW((void)e1(f, 32), UsageError);
    EXPECT_THROW((void)e1(f, 1), UsageError);
    EXPECT_THROW((void)e1(f, 5), UsageError);
    EXPECT_NO_THROW((void)e1(f, 9));
}

TEST(EN, Examples) {
    const std::vector<double> v = {3.0, 4.0};
    EXPECT_NEAR(eN(v), std::sqrt(12.5), 1e-15);
    const std::vector<double> one = {0.25};
    EXPECT_EQ(eN(one), 0.25);
    EXPECT_THROW((void)eN(std::vector<double>{}), UsageError);
}

TEST(FitSlope, ExactLine) {
    const std::vector<std::pair<double, double>> p = {{1, 3}, {2, 1}, {3, -1}};
    EXPECT_NEAR(fit_slope(p), -2.0, 1e-15);
}

TEST(FitSlope, NormalEquations) {
    const std::vector<std::pair<double, double>> p = {{0, 1}, {1, 2}, {2, 2}, {4, 7}};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : p) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = 4.0;
    EXPECT_NEAR(fit_slope(p), (n * sxy - sx * sy) / (n * sxx - sx * sx), 1e-14);
}

TEST(FitSlope, Errors) {
    EXPECT_THROW((void)fit_slope(std::vector<std::pair<double, double>>{{1, 1}}), UsageError);
    EXPECT_THROW((void)fit_slope(std::vector<std::pair<double, double>>{{1, 1}, {1, 2}}), UsageError);
}

TEST(ExpectedSquaredNorm, InitialTime) {
    EXPECT_NEAR(expected_squared_norm(0.0, {}), 0.5, 1e-15);
    EXPECT_NEAR(expected_squared_norm(0.0, {2.0}), 0.5, 1e-15);
}

TEST(ExpectedSquaredNorm, MatchesBruteForceSum) {
    for (double decay : {0.0, 1.0, 2.0}) {
        for (double t : {0.01, 0.3, 1.0}) {
            double s = 0.5 * std::exp(-2 * pi * pi * t);
            const int terms = 2000000;
            for (int j = terms; j >= 1; --j) {
                const double lam = static_cast<double>(j) * j * pi * pi;
                s += std::pow(j, -decay) * -std::expm1(-2 * lam * t) / (2 * lam);
            }
            // Tail beyond the brute-force sum is below 1 / (2 pi^2 terms).
            EXPECT_NEAR(expected_squared_norm(t, {decay}), s, 1.0 / (2 * pi * pi * terms) + 1e-14) << decay << " " << t;
        }
    }
}

TEST(ExpectedSquaredNorm, WhiteNoiseLimit) {
    // Large t: e^{-2 pi^2}/2 + zeta(2)/(2 pi^2) minus exponentially small terms.
    EXPECT_NEAR(expected_squared_norm(1.0, {}), std::exp(-2 * pi * pi) / 2 + 1.0 / 12.0, 1e-9);
}

TEST(ExpectedSquaredNorm, Errors) {
    EXPECT_THROW((void)expected_squared_norm(-0.1, {}), UsageError);
    EXPECT_THROW((void)expected_squared_norm(1.1, {}), UsageError);
    EXPECT_THROW((void)expected_squared_norm(1.0, {-1.0}), UsageError);
}
