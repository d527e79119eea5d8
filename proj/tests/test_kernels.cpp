#include <gtest/gtest.h>

#include <cmath>

#include "mpirecon/error.hpp"
#include "mpirecon/kernels.hpp"
#include "mpirecon/rng.hpp"

using namespace mpirecon;

namespace {

// Reference values computed with 50-digit arithmetic.
struct LangevinRow {
    double z, lambda, lambda_prime, f1, f2;
};

constexpr LangevinRow kRows[] = {
    {1e-6, 3.3333333333331111111e-7, 0.33333333333326666667, 0.33333333333331111111, -4.4444444444435978836e-14},
    {1e-4, 3.3333333311111111132e-5, 0.33333333266666666772, 0.33333333311111111132, -4.4444444359788359915e-10},
    {1e-2, 3.3333111113227492064e-3, 0.33332666677248529102, 0.33333111113227492064, -4.4443597896296125276e-6},
    {0.3, 0.099405096988408256124, 0.32741798010333677369, 0.33135032329469418708, -0.0039323431913574133962},
    {0.5, 0.16395341373865284877, 0.31730562316883072422, 0.32790682747730569754, -0.010601204308474973322},
    {1.0, 0.31303528549933130364, 0.27593833903368953359, 0.31303528549933130364, -0.037096946465641770044},
    {2.5, 0.61356730981260846219, 0.13268130847923177375, 0.24542692392504338488, -0.11274561544581161113},
    {10.0, 0.90000000412230725337, 0.0099999917553854762589, 0.090000000412230725337, -0.080000008656845249078},
    {40.0, 0.975, 0.000625, 0.024375, -0.02375},
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Vec2 field(const Vec2& y, double h) {
    const double r = std::hypot(y[0], y[1]);
    const double l = langevin(r / h);
    return {l * y[0] / r, l * y[1] / r};
}

}  // namespace

TEST(Langevin, MatchesHighPrecisionReference) {
    for (const auto& row : kRows) {
        SCOPED_TRACE(row.z);
        EXPECT_LT(rel(langevin(row.z), row.lambda), 1e-14);
        EXPECT_LT(rel(langevin_derivative(row.z), row.lambda_prime), 1e-13);
        EXPECT_LT(rel(f1(row.z), row.f1), 1e-14);
        EXPECT_LT(rel(f2(row.z), row.f2), 1e-12);
    }
}

TEST(Langevin, ValuesAtOrigin) {
    EXPECT_EQ(langevin(0.0), 0.0);
    EXPECT_DOUBLE_EQ(f1(0.0), 1.0 / 3.0);
    EXPECT_EQ(f2(0.0), 0.0);
    EXPECT_DOUBLE_EQ(langevin_derivative(0.0), 1.0 / 3.0);
}

TEST(Langevin, IsOdd) {
    for (double z : {1e-5, 0.2, 0.7, 3.0, 50.0}) EXPECT_DOUBLE_EQ(langevin(-z), -langevin(z));
}

TEST(Langevin, LeadingSeriesTerms) {
    const double z = 1e-3;
    EXPECT_NEAR(langevin(z), z / 3 - z * z * z / 45, 1e-17);
    EXPECT_NEAR(f1(z), 1.0 / 3 - z * z / 45 + 2 * std::pow(z, 4) / 945, 2e-16);
    EXPECT_NEAR(f2(z), -2 * z * z / 45 + 8 * std::pow(z, 4) / 945, 1e-17);
}

TEST(Langevin, SeriesAndClosedFormAgreeAtThreshold) {
    for (double z : {0.5, 0.25, 0.9}) {
        SCOPED_TRACE(z);
        const double series_only = 1e300;
        const double closed_only = 1e-300;
        EXPECT_NEAR(langevin(z, series_only), langevin(z, closed_only), 1e-12);
        EXPECT_NEAR(f1(z, series_only), f1(z, closed_only), 1e-10);
        EXPECT_NEAR(f2(z, series_only), f2(z, closed_only), 1e-10);
    }
}

TEST(Langevin, F1F2MatchCentralDifferenceOfLambda) {
    const double z = 0.5;
    const double s = 1e-5;
    const double derivative = (langevin(z + s) - langevin(z - s)) / (2 * s);
    EXPECT_NEAR(f1(z), langevin(z) / z, 1e-15);
    EXPECT_NEAR(f2(z), derivative - langevin(z) / z, 1e-8);
}

TEST(Langevin, LargeArgumentsStayFinite) {
    EXPECT_NEAR(langevin(1e6), 1.0 - 1e-6, 1e-15);
    EXPECT_NEAR(f2(800.0), -1.0 / 800.0 + 2.0 / (800.0 * 800.0), 1e-15);
    EXPECT_TRUE(std::isfinite(langevin_derivative(1000.0)));
}

TEST(KernelParams, Validation) {
    KernelParams p;
    EXPECT_NO_THROW(p.validate());
    p.h = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.n = 4;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.series_threshold = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(KernelMatrix, OriginLimit) {
    const KernelParams p{0.01};
    const auto k = kernel_matrix({0.0, 0.0}, p);
    EXPECT_NEAR(k.a11, 100.0 / 3.0, 1e-12);
    EXPECT_NEAR(k.a22, 100.0 / 3.0, 1e-12);
    EXPECT_EQ(k.a12, 0.0);
    // The finite-difference gradient near the origin approaches the same limit.
    const double r = 1e-6;
    const double s = 1e-9;
    const auto gp = field({r + s, 0.0}, p.h);
    const auto gm = field({r - s, 0.0}, p.h);
    EXPECT_NEAR((gp[0] - gm[0]) / (2 * s), k.a11, 1e-4);
}

TEST(KernelMatrix, AxisDirection) {
    const KernelParams p{0.01};
    const auto k = kernel_matrix({0.01, 0.0}, p);
    EXPECT_NEAR(k.a11, (f1(1.0) + f2(1.0)) / 0.01, 1e-12);
    EXPECT_NEAR(k.a22, f1(1.0) / 0.01, 1e-12);
    EXPECT_NEAR(k.a12, 0.0, 1e-15);
}

TEST(KernelMatrix, ReferenceValue) {
    const auto k = kernel_matrix({0.013, -0.007}, KernelParams{0.01});
    EXPECT_NEAR(k.a11, 24.137103119194207011, 1e-12);
    EXPECT_NEAR(k.a12, 2.7880859746039945889, 1e-12);
    EXPECT_NEAR(k.a22, 27.813700008781892183, 1e-12);
}

TEST(KernelMatrix, MatchesFiniteDifferenceJacobian) {
    const KernelParams p{0.01};
    SeededGenerator gen(5);
    for (int t = 0; t < 200; ++t) {
        const double r = p.h + (4.0 - p.h) * gen.uniform_open();
        const double phi = 2 * M_PI * gen.uniform_open();
        const Vec2 y{r * std::cos(phi), r * std::sin(phi)};
        const double s = 1e-5 * p.h;
        const auto dx = [&](int c) { return (field({y[0] + s, y[1]}, p.h)[c] - field({y[0] - s, y[1]}, p.h)[c]) / (2 * s); };
        const auto dy = [&](int c) { return (field({y[0], y[1] + s}, p.h)[c] - field({y[0], y[1] - s}, p.h)[c]) / (2 * s); };
        const auto k = kernel_matrix(y, p);
        const double scale = 1.0 / p.h;
        EXPECT_NEAR(k.a11, dx(0), 1e-6 * scale);
        EXPECT_NEAR(k.a12, dy(0), 1e-6 * scale);
        EXPECT_NEAR(k.a12, dx(1), 1e-6 * scale);
        EXPECT_NEAR(k.a22, dy(1), 1e-6 * scale);
    }
}

TEST(KernelMatrix, ContinuousAcrossThreshold) {
    const KernelParams p{0.01};
    const double r = p.series_threshold * p.h;
    const auto below = kernel_matrix({r * (1 - 1e-12), 0.0}, p);
    const auto above = kernel_matrix({r * (1 + 1e-12), 0.0}, p);
    EXPECT_NEAR(below.a11, above.a11, 1e-10);
    EXPECT_NEAR(below.a22, above.a22, 1e-10);
}

TEST(KernelTrace, OriginValue) {
    EXPECT_NEAR(kernel_trace({0.0, 0.0}, KernelParams{0.01}), 200.0 / 3.0, 1e-12);
}

TEST(KernelTrace, ReferenceValues) {
    EXPECT_NEAR(kernel_trace({0.013, -0.007}, KernelParams{0.01}), 51.950803127976099194, 1e-12);
    KernelParams p3{0.01};
    p3.n = 3;
    EXPECT_NEAR(kernel_trace_radial(0.02, p3), 71.129289088947699662, 1e-12);
}

TEST(KernelTrace, EqualsMatrixTraceOnRandomPoints) {
    const KernelParams p{0.01};
    SeededGenerator gen(3);
    for (int t = 0; t < 1000; ++t) {
        const double r = 4.0 * gen.uniform_open();
        const double phi = 2 * M_PI * gen.uniform_open();
        const Vec2 y{r * std::cos(phi), r * std::sin(phi)};
        const double kt = kernel_trace(y, p);
        EXPECT_LT(rel(kernel_matrix(y, p).trace(), kt), 1e-12);
        EXPECT_GT(kt, 0.0);
    }
}

TEST(KernelTrace, RadialSymmetry) {
    const KernelParams p{0.05};
    const double a = 0.031;
    const double b = -0.077;
    EXPECT_DOUBLE_EQ(kernel_trace({a, b}, p), kernel_trace({b, a}, p));
    EXPECT_DOUBLE_EQ(kernel_trace({a, b}, p), kernel_trace({-a, b}, p));
    EXPECT_DOUBLE_EQ(kernel_trace({a, b}, p), kernel_trace_radial(std::hypot(a, b), p));
}

TEST(KernelTrace, DecaysLikeInverseDistance) {
    const KernelParams p{0.01};
    // f(z) -> 1/z for large z in two dimensions, so kappa ~ 1/|y|.
    EXPECT_NEAR(kernel_trace({2.0, 0.0}, p) * 2.0, 1.0, 1e-2);
}
