#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mpirecon/grid.hpp"
#include "mpirecon/kernels.hpp"
#include "mpirecon/trajectory.hpp"

namespace mpirecon {

/// Signal time series measured along a scan.
struct ScanSeries {
    ScanGeometry geometry;
    std::vector<Vec2> signals;
    double h = 0.01;
    double noise_fraction = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return geometry.size(); }
    void validate() const;
};

/// A = K_h * rho, each matrix entry a linear convolution scaled by the cell area.
MatrixField core_response_field(const ScalarField& rho, const KernelParams& params);

/// kappa_h * rho, scaled by the cell area (the trace of core_response_field).
ScalarField trace_convolution(const ScalarField& rho, const KernelParams& params);

/// Bilinear interpolation of every entry of A at p; p must lie in [-1,1]^2.
Mat2 evaluate_field(const MatrixField& field, const Vec2& p);

/// s_l = A(r_l) v_l.
std::vector<Vec2> simulate_signal(const MatrixField& field, const ScanGeometry& geom);

/// s_l + eps N_l with eps = fraction * max_l |s_l| (Euclidean) and N_l
/// standard normal 2-vectors from SeededGenerator(seed).
std::vector<Vec2> add_noise(const std::vector<Vec2>& signals, double fraction, std::uint64_t seed);

/// CSV with header `t,rx,ry,vx,vy,sx,sy` preceded by a `#` metadata line.
void write_series_csv(const ScanSeries& series, std::ostream& out);
void save_series_csv(const ScanSeries& series, const std::string& path);
ScanSeries read_series_csv(std::istream& in);
ScanSeries load_series_csv(const std::string& path);

}  // namespace mpirecon
