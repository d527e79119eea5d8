#include "mpirecon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpirecon/error.hpp"

namespace mpirecon {

ScalarField::ScalarField(std::size_t nx, std::size_t ny, double fill)
    : nx_(nx), ny_(ny), values_(nx * ny, fill) {}

ScalarField::ScalarField(std::size_t nx, std::size_t ny, std::vector<double> values)
    : nx_(nx), ny_(ny), values_(std::move(values)) {
    detail::require(values_.size() == nx * ny, "ScalarField: value count does not match nx*ny");
}

double ScalarField::x_center(std::size_t i) const { return cell_center(i, nx_); }
double ScalarField::y_center(std::size_t j) const { return cell_center(j, ny_); }

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    detail::require(same_shape(other), "ScalarField: shape mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    detail::require(same_shape(other), "ScalarField: shape mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double dot(const ScalarField& a, const ScalarField& b) {
    detail::require(a.same_shape(b), "dot: shape mismatch");
    return std::inner_product(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
}

double norm(const ScalarField& a) { return std::sqrt(dot(a, a)); }

namespace {

// Fractional cell coordinate of x on an n-cell axis, clamped to [0, n-1].
double axis_coordinate(double x, std::size_t n) {
    const double c = (x + 1.0) * static_cast<double>(n) / 2.0 - 0.5;
    return std::clamp(c, 0.0, static_cast<double>(n - 1));
}

}  // namespace

double interpolate_bilinear(const ScalarField& field, const Vec2& p) {
    detail::require(p[0] >= -1.0 && p[0] <= 1.0 && p[1] >= -1.0 && p[1] <= 1.0,
                    "interpolate_bilinear: point outside [-1,1]^2");
    const double cx = axis_coordinate(p[0], field.nx());
    const double cy = axis_coordinate(p[1], field.ny());
    const std::size_t i0 = std::min(static_cast<std::size_t>(cx), field.nx() - 1);
    const std::size_t j0 = std::min(static_cast<std::size_t>(cy), field.ny() - 1);
    const std::size_t i1 = std::min(i0 + 1, field.nx() - 1);
    const std::size_t j1 = std::min(j0 + 1, field.ny() - 1);
    const double tx = cx - static_cast<double>(i0);
    const double ty = cy - static_cast<double>(j0);
    const double bottom = (1.0 - tx) * field(i0, j0) + tx * field(i1, j0);
    const double top = (1.0 - tx) * field(i0, j1) + tx * field(i1, j1);
    return (1.0 - ty) * bottom + ty * top;
}

namespace {

struct OverlapWeight {
    std::size_t fine;
    double weight;
};

// For every coarse cell, the fine cells overlapping it and the overlap length
// as a fraction of the coarse cell width.
std::vector<std::vector<OverlapWeight>> axis_overlaps(std::size_t fine, std::size_t coarse) {
    std::vector<std::vector<OverlapWeight>> out(coarse);
    const double fw = 1.0 / static_cast<double>(fine);
    const double cw = 1.0 / static_cast<double>(coarse);
    for (std::size_t c = 0; c < coarse; ++c) {
        const double lo = c * cw;
        const double hi = (c + 1) * cw;
        const auto first = static_cast<std::size_t>(std::floor(lo / fw));
        for (std::size_t f = first; f < fine; ++f) {
            const double flo = f * fw;
            const double fhi = (f + 1) * fw;
            if (flo >= hi) break;
            const double overlap = std::min(hi, fhi) - std::max(lo, flo);
            if (overlap > 0.0) out[c].push_back({f, overlap / cw});
        }
    }
    return out;
}

}  // namespace

ScalarField resample_area(const ScalarField& fine, std::size_t nx, std::size_t ny) {
    detail::require(nx >= 1 && ny >= 1, "resample_area: empty target grid");
    const auto wx = axis_overlaps(fine.nx(), nx);
    const auto wy = axis_overlaps(fine.ny(), ny);
    // Separable: first along x for every fine row, then along y.
    ScalarField rows(nx, fine.ny());
    for (std::size_t j = 0; j < fine.ny(); ++j)
        for (std::size_t c = 0; c < nx; ++c) {
            double acc = 0.0;
            for (const auto& w : wx[c]) acc += w.weight * fine(w.fine, j);
            rows(c, j) = acc;
        }
    ScalarField out(nx, ny);
    for (std::size_t c = 0; c < ny; ++c)
        for (std::size_t i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (const auto& w : wy[c]) acc += w.weight * rows(i, w.fine);
            out(i, c) = acc;
        }
    return out;
}

}  // namespace mpirecon
