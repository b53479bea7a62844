#include <gtest/gtest.h>

#include "emholo/spectral.hpp"
#include "test_support.hpp"

using namespace emholo;

TEST(Dft, ConstantGivesDcOnly) {
    const ComplexGrid2D x(Geometry{4, 4, 1.0, 1.0}, complex_t(1.0, 0.0));
    const auto X = dft2(x);
    EXPECT_NEAR(std::abs(X[0] - complex_t(16.0, 0.0)), 0.0, 1e-12);
    for (std::size_t i = 1; i < X.size(); ++i) EXPECT_NEAR(std::abs(X[i]), 0.0, 1e-12);
}

TEST(Dft, ImpulseGivesAllOnes) {
    ComplexGrid2D x(Geometry{6, 5, 1.0, 1.0});
    x(0, 0) = 1.0;
    const auto X = dft2(x);
    for (const auto& v : X) EXPECT_NEAR(std::abs(v - complex_t(1.0, 0.0)), 0.0, 1e-12);
}

TEST(Dft, RoundTrip) {
    const auto x = fixtures::random_complex(8, 8, 11);
    EXPECT_LT(fixtures::relative_distance(idft2(dft2(x)), x), 1e-12);
    const auto y = fixtures::random_complex(7, 10, 12);
    EXPECT_LT(fixtures::relative_distance(idft2(dft2(y)), y), 1e-12);
}

TEST(Idft, AllOnesGivesImpulse) {
    const ComplexGrid2D X(Geometry{4, 4, 1.0, 1.0}, complex_t(1.0, 0.0));
    const auto x = idft2(X);
    EXPECT_NEAR(std::abs(x[0] - complex_t(1.0, 0.0)), 0.0, 1e-12);
    for (std::size_t i = 1; i < x.size(); ++i) EXPECT_NEAR(std::abs(x[i]), 0.0, 1e-12);
}

TEST(Idft, ZeroGivesZero) {
    const ComplexGrid2D X(Geometry{4, 3, 1.0, 1.0});
    for (const auto& v : idft2(X)) EXPECT_EQ(v, complex_t(0.0, 0.0));
}

TEST(Dft, Parseval) {
    const auto x = fixtures::random_complex(8, 8, 13);
    const auto X = dft2(x);
    const double lhs = norm2(x) * norm2(x);
    const double rhs = norm2(X) * norm2(X) / static_cast<double>(x.size());
    EXPECT_LT(fixtures::relative_error(lhs, rhs), 1e-12);
}

TEST(Dft, Linearity) {
    const auto x = fixtures::random_complex(8, 8, 14);
    const auto y = fixtures::random_complex(8, 8, 15);
    const complex_t a(0.3, -1.2);
    const complex_t b(2.0, 0.5);
    ComplexGrid2D combo(x.geometry());
    for (std::size_t i = 0; i < x.size(); ++i) combo[i] = a * x[i] + b * y[i];
    const auto X = dft2(x);
    const auto Y = dft2(y);
    ComplexGrid2D expected(x.geometry());
    for (std::size_t i = 0; i < x.size(); ++i) expected[i] = a * X[i] + b * Y[i];
    EXPECT_LT(fixtures::relative_distance(dft2(combo), expected), 1e-12);
}

TEST(Dft, RejectsNonFinite) {
    ComplexGrid2D x(Geometry{4, 4, 1.0, 1.0});
    x(2, 3) = complex_t(std::numeric_limits<double>::infinity(), 0.0);
    EXPECT_THROW(dft2(x), NumericError);
    EXPECT_THROW(idft2(x), NumericError);
}

TEST(Frequency, FourSamples) {
    const auto f = frequency_coordinates(4, 4, 1.0, 1.0);
    const std::vector<double> expected{0.0, 0.25, -0.5, -0.25};
    ASSERT_EQ(f.vx.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(f.vx[i], expected[i]);
        EXPECT_DOUBLE_EQ(f.vy[i], expected[i]);
    }
}

TEST(Frequency, OddLength) {
    const auto f = frequency_coordinates(5, 3, 1.0, 2.0);
    const std::vector<double> ex{0.0, 0.2, 0.4, -0.4, -0.2};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(f.vx[i], ex[i]);
    EXPECT_DOUBLE_EQ(f.vy[1], 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(f.vy[2], -1.0 / 6.0);
}

TEST(Frequency, SensorSpacing) {
    const auto f = frequency_coordinates(512, 512, 1.12e-6, 1.12e-6);
    EXPECT_NEAR(f.dvx, 1743.86, 0.01);
    EXPECT_DOUBLE_EQ(f.dvx, 1.0 / (512 * 1.12e-6));
}

TEST(Frequency, WithinNyquist) {
    for (std::size_t n : {4u, 5u, 512u, 513u}) {
        const double pitch = 1.12e-6;
        const auto f = frequency_coordinates(n, n, pitch, pitch);
        double peak = 0.0;
        for (double v : f.vx) peak = std::max(peak, std::fabs(v));
        if (n % 2 == 1) {
            EXPECT_LT(peak, 1.0 / (2 * pitch));
        } else {
            EXPECT_LE(peak, 1.0 / (2 * pitch) * (1 + 1e-15));
        }
    }
}

TEST(Frequency, RejectsBadPitch) {
    EXPECT_THROW(frequency_coordinates(4, 4, 0.0, 1.0), ConfigError);
    EXPECT_THROW(frequency_coordinates(4, 4, 1.0, -1.0), ConfigError);
}
