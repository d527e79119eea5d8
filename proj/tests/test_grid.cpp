#include <gtest/gtest.h>

#include "mpirecon/error.hpp"
#include "mpirecon/grid.hpp"
#include "test_support.hpp"

using namespace mpirecon;

TEST(ScalarField, LayoutAndCenters) {
    ScalarField f(4, 2);
    f(3, 1) = 5.0;
    EXPECT_EQ(f[1 * 4 + 3], 5.0);
    EXPECT_DOUBLE_EQ(f.x_center(0), -0.75);
    EXPECT_DOUBLE_EQ(f.y_center(1), 0.5);
    EXPECT_DOUBLE_EQ(f.cell_area(), 0.5);
    EXPECT_DOUBLE_EQ(cell_center(99, 100), 0.99);
}

TEST(ScalarField, Arithmetic) {
    const auto a = test::random_field(5, 3, 1);
    const auto b = test::random_field(5, 3, 2);
    const auto c = a + b - a;
    for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(c[k], b[k], 1e-15);
    EXPECT_NEAR(dot(2.0 * a, b), 2.0 * dot(a, b), 1e-12);
    EXPECT_NEAR(norm(a) * norm(a), dot(a, a), 1e-12);
    ScalarField d(4, 4);
    EXPECT_THROW(d += a, InvalidArgument);
}

TEST(ScalarField, RejectsMismatchedStorage) {
    EXPECT_THROW(ScalarField(3, 3, std::vector<double>(8)), InvalidArgument);
}

TEST(Bilinear, ReproducesAffineFunctions) {
    ScalarField f(16, 12);
    const auto g = [](double x, double y) { return 2.0 - 0.5 * x + 3.0 * y; };
    for (std::size_t j = 0; j < f.ny(); ++j)
        for (std::size_t i = 0; i < f.nx(); ++i) f(i, j) = g(f.x_center(i), f.y_center(j));
    for (const Vec2 p : {Vec2{0.1, -0.3}, Vec2{0.9, 0.8}, Vec2{-0.9, 0.0}})
        EXPECT_NEAR(interpolate_bilinear(f, p), g(p[0], p[1]), 1e-13);
    EXPECT_DOUBLE_EQ(interpolate_bilinear(f, {f.x_center(3), f.y_center(7)}), f(3, 7));
    // Within half a cell of the edge the outermost centers are used.
    EXPECT_DOUBLE_EQ(interpolate_bilinear(f, {1.0, 1.0}), f(15, 11));
    EXPECT_THROW(interpolate_bilinear(f, {1.1, 0.0}), InvalidArgument);
}

TEST(ResampleArea, PreservesMeanAndConstants) {
    const auto f = test::random_field(512, 512, 4);
    const auto g = resample_area(f, 100, 100);
    EXPECT_NEAR(g.sum() * g.cell_area(), f.sum() * f.cell_area(), 1e-10);
    const auto c = resample_area(ScalarField(30, 30, 2.5), 7, 7);
    for (double v : c.values()) EXPECT_NEAR(v, 2.5, 1e-14);
}

TEST(ResampleArea, IntegerFactorIsBlockAverage) {
    const auto f = test::random_field(8, 8, 9);
    const auto g = resample_area(f, 4, 4);
    EXPECT_NEAR(g(1, 2), 0.25 * (f(2, 4) + f(3, 4) + f(2, 5) + f(3, 5)), 1e-15);
}
