#include <gtest/gtest.h>

#include <cmath>

#include "emholo/random.hpp"

using namespace emholo;

TEST(CounterRng, SplitMixFinalizer) {
    EXPECT_EQ(CounterRng::mix(0), 0u);
    EXPECT_EQ(CounterRng::mix(0x9E3779B97F4A7C15ULL), 0xE220A8397B1DCDAFULL);
}

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
    CounterRng a(7, 3);
    CounterRng b(7, 3);
    CounterRng c(7, 4);
    CounterRng d(8, 3);
    for (int i = 0; i < 16; ++i) {
        const auto va = a.next();
        EXPECT_EQ(va, b.next());
        EXPECT_NE(va, c.next());
        EXPECT_NE(va, d.next());
    }
}

TEST(CounterRng, UniformRangeAndMean) {
    CounterRng r(1, 0);
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
    }
    EXPECT_NEAR(s / n, 0.5, 0.005);
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVariance) {
    const double lambda = GetParam();
    const int n = 100000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        CounterRng r(123, static_cast<std::uint64_t>(i));
        const double k = static_cast<double>(sample_poisson(lambda, r));
        s += k;
        s2 += k * k;
    }
    const double m = s / n;
    const double v = s2 / n - m * m;
    EXPECT_NEAR(m, lambda, 5.0 * std::sqrt(lambda / n));
    EXPECT_NEAR(v / lambda, 1.0, 0.03);
}

INSTANTIATE_TEST_SUITE_P(Means, PoissonMoments, ::testing::Values(0.5, 3.0, 9.9, 10.0, 100.0, 1e4, 1e6));

TEST(Poisson, ZeroMeanIsZero) {
    CounterRng r(1, 1);
    EXPECT_EQ(sample_poisson(0.0, r), 0u);
}
