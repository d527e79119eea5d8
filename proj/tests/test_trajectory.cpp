#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mpirecon/error.hpp"
#include "mpirecon/trajectory.hpp"

using namespace mpirecon;

TEST(Lissajous, StartPoint) {
    const LissajousSpec s;
    const auto p = lissajous_position(s, 0.0);
    const auto v = lissajous_velocity(s, 0.0);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[1], 1.0);
    EXPECT_NEAR(v[0], 0.0, 1e-12);
    EXPECT_NEAR(v[1], 0.0, 1e-12);
}

TEST(Lissajous, QuarterTime) {
    const auto p = lissajous_position(LissajousSpec{}, 0.25);
    EXPECT_NEAR(p[0], 1.0, 1e-14);
    EXPECT_NEAR(p[1], 0.0, 1e-14);
}

TEST(Lissajous, VelocityMatchesFiniteDifference) {
    const LissajousSpec s;
    const double step = 1e-6;
    for (double t : {0.013, 0.4, 0.77}) {
        const auto a = lissajous_position(s, t + step);
        const auto b = lissajous_position(s, t - step);
        const auto v = lissajous_velocity(s, t);
        EXPECT_NEAR(v[0], (a[0] - b[0]) / (2 * step), 1e-6 * 2 * M_PI * 16);
        EXPECT_NEAR(v[1], (a[1] - b[1]) / (2 * step), 1e-6 * 2 * M_PI * 17);
    }
}

TEST(Lissajous, Validation) {
    LissajousSpec s;
    s.freq_y = 16.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.freq_x = -1.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Schedule, HalfOpen) {
    EXPECT_EQ(sample_schedule(4), (std::vector<double>{0.0, 0.25, 0.5, 0.75}));
    EXPECT_EQ(sample_schedule(1), (std::vector<double>{0.0}));
    const auto t = sample_schedule(1632);
    ASSERT_EQ(t.size(), 1632u);
    EXPECT_NEAR(t[1] - t[0], 1.0 / 1632, 1e-17);
    EXPECT_LT(t.back(), 1.0);
    EXPECT_THROW(sample_schedule(0), InvalidArgument);
}

TEST(Scan, StaysInDomain) {
    const auto g = make_lissajous_scan(LissajousSpec{}, 1632);
    g.validate();
    for (const auto& p : g.positions) {
        EXPECT_LE(std::abs(p[0]), 1.0);
        EXPECT_LE(std::abs(p[1]), 1.0);
    }
}

TEST(Scan, RotationQuarterTurn) {
    ScanGeometry g;
    g.times = {0.0};
    g.positions = {{1.0, 0.0}};
    g.velocities = {{0.3, 0.4}};
    const auto r = rotate_scan(g, 1);
    EXPECT_NEAR(r.positions[0][0], 0.0, 1e-15);
    EXPECT_NEAR(r.positions[0][1], 1.0, 1e-15);
    EXPECT_NEAR(std::hypot(r.velocities[0][0], r.velocities[0][1]), 0.5, 1e-15);
    const auto id = rotate_scan(g, 0);
    EXPECT_EQ(id.positions, g.positions);
    EXPECT_EQ(id.velocities, g.velocities);
    const auto full = rotate_scan(rotate_scan(g, 3), 1);
    EXPECT_NEAR(full.positions[0][0], 1.0, 1e-15);
    EXPECT_THROW(rotate_scan(g, 4), InvalidArgument);
}

TEST(Scan, RotationPreservesSpeeds) {
    const auto g = make_lissajous_scan(LissajousSpec{}, 200);
    const auto r = rotate_scan(g, 1);
    for (std::size_t l = 0; l < g.size(); ++l) {
        EXPECT_NEAR(std::hypot(r.velocities[l][0], r.velocities[l][1]),
                    std::hypot(g.velocities[l][0], g.velocities[l][1]), 1e-12);
        EXPECT_EQ(r.times[l], g.times[l]);
    }
}

TEST(Scan, MergeConcatenates) {
    const auto a = make_lissajous_scan(LissajousSpec{}, 1632);
    const auto m = merge_scans(a, rotate_scan(a, 1));
    EXPECT_EQ(m.size(), 3264u);
    EXPECT_EQ(m.positions[0], a.positions[0]);
    EXPECT_THROW(merge_scans(a, ScanGeometry{}), InvalidArgument);
}

TEST(Scan, MergedCoversMoreCells) {
    const auto a = make_lissajous_scan(LissajousSpec{}, 1632);
    const auto b = rotate_scan(a, 1);
    const auto m = merge_scans(a, b);
    EXPECT_GT(occupied_cells(m, 19), occupied_cells(a, 19));
    EXPECT_GT(occupied_cells(m, 19), occupied_cells(b, 19));
}

TEST(Scan, CsvRoundTrip) {
    const auto g = make_lissajous_scan(LissajousSpec{}, 50);
    std::stringstream ss;
    write_geometry_csv(g, ss);
    EXPECT_EQ(ss.str().substr(0, 14), "t,rx,ry,vx,vy\n");
    const auto r = read_geometry_csv(ss);
    EXPECT_EQ(r.times, g.times);
    EXPECT_EQ(r.positions, g.positions);
    EXPECT_EQ(r.velocities, g.velocities);
}
