#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "gaussmiss/odd_series.hpp"
#include "gaussmiss/types.hpp"

using namespace gaussmiss;

namespace {

OddHarmonicSeries random_series(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> terms(1, 6);
    std::vector<HarmonicTerm> ts;
    const int n = terms(rng);
    for (int i = 0; i < n; ++i) ts.push_back({2 * i + 1, coef(rng), coef(rng)});
    return OddHarmonicSeries(ts);
}

}  // namespace

TEST(OddSeries, RejectsEvenOrNonPositiveFrequency) {
    EXPECT_THROW(OddHarmonicSeries({{2, 1.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(OddHarmonicSeries({{0, 1.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(OddHarmonicSeries({{-3, 1.0, 0.0}}), std::invalid_argument);
}

TEST(OddSeries, EvaluatesCosineAndSineTerms) {
    const OddHarmonicSeries z({{3, 1.0, 0.0}, {1, 0.0, 2.0}});
    for (double th : {0.0, 0.3, 1.7, 4.0}) {
        EXPECT_NEAR(z(th), std::cos(3 * th) + 2 * std::sin(th), 1e-15);
        EXPECT_NEAR(z.derivative(th), -3 * std::sin(3 * th) + 2 * std::cos(th), 1e-14);
        EXPECT_NEAR(z.second_derivative(th), -9 * std::cos(3 * th) - 2 * std::sin(th), 1e-13);
    }
    EXPECT_EQ(z.max_degree(), 3);
}

TEST(OddSeries, MergesDuplicatesAndDropsZeros) {
    const OddHarmonicSeries z({{5, 1.0, 0.0}, {1, 0.5, 0.0}, {5, -1.0, 0.0}});
    ASSERT_EQ(z.terms().size(), 1u);
    EXPECT_EQ(z.terms()[0].k, 1);
    EXPECT_EQ(z.max_degree(), 1);
    EXPECT_TRUE(OddHarmonicSeries::zero().is_zero());
    EXPECT_EQ(OddHarmonicSeries::zero()(1.0), 0.0);
}

TEST(OddSeries, AntipodalOddness) {
    std::mt19937_64 rng(11);
    for (int s = 0; s < 50; ++s) {
        const OddHarmonicSeries z = random_series(rng);
        for (int i = 0; i < 4096; ++i) {
            const double th = kTwoPi * i / 4096;
            ASSERT_LT(std::abs(z(th) + z(th + kPi)), 1e-12);
        }
    }
}

TEST(OddSeries, BoundsDominateSampledValues) {
    std::mt19937_64 rng(12);
    for (int s = 0; s < 20; ++s) {
        const OddHarmonicSeries z = random_series(rng);
        double sup = 0.0, dsup = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double th = kTwoPi * i / 10000;
            sup = std::max(sup, std::abs(z(th)));
            dsup = std::max(dsup, std::abs(z.derivative(th)));
        }
        EXPECT_LE(sup, z.sup_bound() + 1e-12);
        EXPECT_LE(dsup, z.derivative_bound() + 1e-12);
    }
}

TEST(OddSeries, DerivativeMatchesFiniteDifference) {
    std::mt19937_64 rng(13);
    const OddHarmonicSeries z = random_series(rng);
    const double h = 1e-5;
    for (double th : {0.1, 1.0, 2.5, 5.9}) {
        EXPECT_NEAR(z.derivative(th), (z(th + h) - z(th - h)) / (2 * h), 1e-7);
        EXPECT_NEAR(z.second_derivative(th), (z.derivative(th + h) - z.derivative(th - h)) / (2 * h),
                    1e-6);
    }
}

TEST(OddSeries, NegatedFlipsSign) {
    const OddHarmonicSeries z({{1, 0.3, -0.2}, {7, 0.1, 0.4}});
    const OddHarmonicSeries n = z.negated();
    for (double th : {0.0, 0.8, 3.3}) EXPECT_EQ(n(th), -z(th));
}
