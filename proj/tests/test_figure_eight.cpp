#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "gaussmiss/figure_eight.hpp"
#include "gaussmiss/types.hpp"

using namespace gaussmiss;
namespace fe = gaussmiss::figure_eight;

namespace {

// Unit normal = tangent rotated by -pi/2; angle lifted continuously from t = 0.
double sampled_extent(double delta, int samples) {
    const FigureEightParams p(delta);
    double lo = 0.0, hi = 0.0, prev = 0.0, lift = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = kTwoPi * i / samples;
        const Eigen::Vector2d d = fe::derivative(p, t);
        const double raw = std::atan2(-d.x(), d.y());
        if (i > 0) {
            double step = raw - prev;
            step -= kTwoPi * std::round(step / kTwoPi);
            lift += step;
        } else {
            lift = raw;
        }
        prev = raw;
        lo = std::min(lo, lift);
        hi = std::max(hi, lift);
    }
    return hi - lo;
}

}  // namespace

TEST(FigureEightParamsTest, RejectsOutOfRange) {
    EXPECT_THROW(FigureEightParams(0.0), std::invalid_argument);
    EXPECT_THROW(FigureEightParams(-0.1), std::invalid_argument);
    EXPECT_THROW(FigureEightParams(1.5), std::invalid_argument);
    EXPECT_NO_THROW(FigureEightParams(1.0));
}

TEST(FigureEight, EvalExamples) {
    const FigureEightParams half(0.5), eighth(0.125);
    EXPECT_LT((fe::eval(half, 0.0) - Eigen::Vector2d(1, 0)).norm(), 1e-15);
    EXPECT_LT((fe::eval(half, kPi / 4) - Eigen::Vector2d(std::sqrt(2.0) / 2, 0.5)).norm(), 1e-15);
    EXPECT_LT((fe::eval(eighth, kPi) - Eigen::Vector2d(-1, 0)).norm(), 1e-15);
}

TEST(FigureEight, DerivativeExamples) {
    EXPECT_LT((fe::derivative(FigureEightParams(0.5), 0.0) - Eigen::Vector2d(0, 1)).norm(), 1e-15);
    EXPECT_LT((fe::derivative(FigureEightParams(0.125), kPi / 2) - Eigen::Vector2d(-1, -0.25)).norm(),
              1e-15);
}

TEST(FigureEight, DerivativesMatchFiniteDifferences) {
    const FigureEightParams p(0.3);
    const double h = 1e-5;
    for (double t : {0.2, 1.1, 2.9, 5.0}) {
        const Eigen::Vector2d fd = (fe::eval(p, t + h) - fe::eval(p, t - h)) / (2 * h);
        EXPECT_LT((fd - fe::derivative(p, t)).norm(), 1e-9);
        const Eigen::Vector2d fd2 = (fe::derivative(p, t + h) - fe::derivative(p, t - h)) / (2 * h);
        EXPECT_LT((fd2 - fe::second_derivative(p, t)).norm(), 1e-8);
        const double nfd = (fe::normal_angle(p, t + h) - fe::normal_angle(p, t - h)) / (2 * h);
        EXPECT_NEAR(nfd, fe::normal_angle_rate(p, t), 1e-7);
    }
}

TEST(FigureEight, SpeedNeverVanishes) {
    for (double delta : {1e-4, 1e-2, 0.125, 0.5, 1.0}) {
        const FigureEightParams p(delta);
        double lo = 1e9;
        for (int i = 0; i < 10000; ++i) lo = std::min(lo, fe::derivative(p, kTwoPi * i / 10000).norm());
        EXPECT_GT(lo, std::min(1.0, 2 * delta) / std::sqrt(2.0) * 0.5) << delta;
    }
}

TEST(FigureEight, SymmetriesAndPeriodicity) {
    const FigureEightParams p(0.2);
    for (int i = 0; i < 1000; ++i) {
        const double t = kTwoPi * i / 1000 - kPi;
        ASSERT_LT((fe::eval(p, t + kTwoPi) - fe::eval(p, t)).norm(), 1e-14);
        const Eigen::Vector2d a = fe::eval(p, t), b = fe::eval(p, -t);
        ASSERT_NEAR(a.x(), b.x(), 1e-15);
        ASSERT_NEAR(a.y(), -b.y(), 1e-15);
        ASSERT_NEAR(fe::normal_angle(p, -t), -fe::normal_angle(p, t), 1e-12);
    }
}

TEST(FigureEight, NormalAngleExamples) {
    const FigureEightParams half(0.5);
    EXPECT_EQ(fe::normal_angle(half, 0.0), 0.0);
    EXPECT_NEAR(fe::normal_angle(half, kPi / 2), kPi / 2 + std::atan(1.0), 1e-15);
    EXPECT_NEAR(fe::normal_angle(half, kTwoPi), 0.0, 1e-12);
    // Normal is the tangent rotated by -pi/2.
    for (double t : {0.3, 2.0, 4.4}) {
        const Eigen::Vector2d d = fe::derivative(half, t).normalized();
        const double nu = fe::normal_angle(half, t);
        EXPECT_NEAR(std::cos(nu), d.y(), 1e-12);
        EXPECT_NEAR(std::sin(nu), -d.x(), 1e-12);
    }
}

TEST(FigureEight, NormalAngleMaximum) {
    for (double delta : {0.125, 0.5}) {
        const FigureEightParams p(delta);
        double hi = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) hi = std::max(hi, std::abs(fe::normal_angle(p, kTwoPi * i / n)));
        EXPECT_NEAR(hi, (fe::spherical_image_length(p) - kPi) / 2 + kPi / 2, 1e-9);
        EXPECT_NEAR(hi, kPi / 2 + std::atan(2 * delta), 1e-9);
    }
}

TEST(FigureEight, ImageLengthAgainstSamplingOracle) {
    EXPECT_NEAR(fe::spherical_image_length(FigureEightParams(0.5)), 1.5 * kPi, 1e-12);
    for (double delta : {0.5, 0.25, 0.125, 1e-2, 1e-4}) {
        const double oracle = sampled_extent(delta, 1000000);
        EXPECT_NEAR(fe::spherical_image_length(FigureEightParams(delta)), oracle, 1e-6) << delta;
    }
    // Sampling-oracle value at delta = 1/8, frozen.
    EXPECT_NEAR(fe::spherical_image_length(FigureEightParams(0.125)), 3.6315499798, 1e-9);
    EXPECT_LT(fe::spherical_image_length(FigureEightParams(1e-4)) - kPi, 5e-4);
}

TEST(FigureEight, ImageLengthIncreasing) {
    double prev = kPi;
    for (int i = 1; i <= 1000; ++i) {
        const double l = fe::spherical_image_length(FigureEightParams(i / 1000.0));
        ASSERT_GT(l, prev);
        prev = l;
    }
}

TEST(FigureEight, MaxDeltaForArc) {
    EXPECT_NEAR(fe::max_delta_for_arc(kPi / 2), 0.5, 1e-15);
    EXPECT_NEAR(fe::max_delta_for_arc(2 * std::atan(0.25)), 0.125, 1e-15);
    EXPECT_THROW(fe::max_delta_for_arc(0.0), std::invalid_argument);
    EXPECT_THROW(fe::max_delta_for_arc(-1.0), std::invalid_argument);
    for (double alpha : {1e-3, 0.1, 0.5, 1.0, 2.0}) {
        const double d = fe::max_delta_for_arc(alpha);
        EXPECT_LE(fe::spherical_image_length(FigureEightParams(d)), kPi + alpha + 1e-12);
        EXPECT_GT(fe::spherical_image_length(FigureEightParams(1.01 * d)), kPi + alpha);
    }
    // Beyond the artifact limit delta = 1 the answer saturates.
    EXPECT_EQ(fe::max_delta_for_arc(3.0), 1.0);
}
