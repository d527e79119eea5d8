#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include "mpirecon/grid.hpp"

namespace mpirecon {

/// Lissajous curve r(t) = (sin(2 pi fx t + px), sin(2 pi fy t + py)) on [0,1].
struct LissajousSpec {
    double freq_x = 16.0;
    double freq_y = 17.0;
    double phase_x = std::numbers::pi / 2.0;
    double phase_y = std::numbers::pi / 2.0;

    void validate() const;
};

Vec2 lissajous_position(const LissajousSpec& spec, double t);
Vec2 lissajous_velocity(const LissajousSpec& spec, double t);

/// Equidistant half-open schedule t_l = l / L, l = 0..L-1.
std::vector<double> sample_schedule(std::size_t count);

/// Sample times with the positions and velocities of the field free point.
struct ScanGeometry {
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    void validate() const;
};

/// Samples a Lissajous trajectory at the half-open schedule of `count` samples.
ScanGeometry make_lissajous_scan(const LissajousSpec& spec, std::size_t count);

/// Rotates positions and velocities by quarter_turns * 90 degrees about the origin.
ScanGeometry rotate_scan(const ScanGeometry& geom, int quarter_turns);

/// Concatenation a then b. Both must be non-empty.
ScanGeometry merge_scans(const ScanGeometry& a, const ScanGeometry& b);

/// Number of cells of an n-by-n grid over [-1,1]^2 containing at least one sample.
std::size_t occupied_cells(const ScanGeometry& geom, std::size_t n);

/// CSV with header `t,rx,ry,vx,vy`.
void write_geometry_csv(const ScanGeometry& geom, std::ostream& out);
void save_geometry_csv(const ScanGeometry& geom, const std::string& path);
ScanGeometry read_geometry_csv(std::istream& in);

}  // namespace mpirecon
