#include <gtest/gtest.h>

#include <thread>

#include "emholo/grid.hpp"
#include "test_support.hpp"

using namespace emholo;

TEST(Grid, RejectsDegenerateGeometry) {
    EXPECT_THROW(RealGrid2D(Geometry{1, 4, 1.0, 1.0}), ConfigError);
    EXPECT_THROW(RealGrid2D(Geometry{4, 4, 0.0, 1.0}), ConfigError);
    EXPECT_THROW(RealGrid2D(Geometry{4, 4, 1.0, -1.0}), ConfigError);
    EXPECT_NO_THROW(RealGrid2D(Geometry{2, 3, 1.0, 1.0}));
}

TEST(Grid, RejectsMismatchedData) {
    EXPECT_THROW(RealGrid2D(Geometry{3, 3, 1.0, 1.0}, std::vector<double>(8)), ConfigError);
}

TEST(Grid, RowMajorIndexing) {
    RealGrid2D g(Geometry{3, 2, 1.0, 1.0});
    g(2, 1) = 5.0;
    EXPECT_EQ(g[5], 5.0);
}

TEST(Grid, ComplexParts) {
    const auto re = fixtures::random_real(5, 4, 1);
    const auto im = fixtures::random_real(5, 4, 2);
    const auto c = to_complex(re, im);
    EXPECT_EQ(real_part(c), re);
    EXPECT_EQ(imag_part(c), im);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_DOUBLE_EQ(abs(c)[i], std::abs(c[i]));
}

TEST(Grid, Reductions) {
    RealGrid2D g(Geometry{2, 2, 1.0, 1.0}, std::vector<double>{1.0, -2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(sum(g), 6.0);
    EXPECT_DOUBLE_EQ(mean(g), 1.5);
    EXPECT_DOUBLE_EQ(min_value(g), -2.0);
    EXPECT_DOUBLE_EQ(max_value(g), 4.0);
    EXPECT_DOUBLE_EQ(norm2(g), std::sqrt(30.0));
    EXPECT_DOUBLE_EQ(dot(g, g), 30.0);
}

TEST(Grid, RequireFiniteNamesPixel) {
    RealGrid2D g(Geometry{4, 4, 1.0, 1.0});
    g(1, 2) = std::nan("");
    try {
        require_finite(g, "probe");
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 2)"), std::string::npos);
    }
}

TEST(Grid, ValueSemanticsAcrossThreads) {
    const auto g = fixtures::random_real(16, 16, 3);
    RealGrid2D copy;
    std::thread t([&] { copy = g; });
    t.join();
    EXPECT_EQ(copy, g);
}
