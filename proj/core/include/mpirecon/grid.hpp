#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mpirecon {

using Vec2 = std::array<double, 2>;

/// Real function sampled on a cell-centered nx-by-ny grid over [-1,1]^2.
///
/// Storage is row-major with x varying fastest: value(i, j) lives at
/// index j * nx + i and belongs to the cell center
/// (-1 + (2i+1)/nx, -1 + (2j+1)/ny).
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(std::size_t nx, std::size_t ny, double fill = 0.0);
    ScalarField(std::size_t nx, std::size_t ny, std::vector<double> values);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double x_center(std::size_t i) const;
    double y_center(std::size_t j) const;
    double dx() const { return 2.0 / static_cast<double>(nx_); }
    double dy() const { return 2.0 / static_cast<double>(ny_); }
    double cell_area() const { return dx() * dy(); }

    bool same_shape(const ScalarField& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_;
    }

    double min() const;
    double max() const;
    double sum() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

double dot(const ScalarField& a, const ScalarField& b);
double norm(const ScalarField& a);

/// Coordinate of cell center k on an n-cell axis over [-1,1].
inline double cell_center(std::size_t k, std::size_t n) {
    return -1.0 + (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
}

/// Symmetric 2x2 matrix.
struct SymMat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    double trace() const { return a11 + a22; }
};

/// General 2x2 matrix, row-major.
struct Mat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;

    double trace() const { return a11 + a22; }
    double frobenius_sq() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
    Vec2 apply(const Vec2& v) const { return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]}; }
};

/// 2x2-matrix valued field on a cell-centered grid, one ScalarField per entry.
struct MatrixField {
    ScalarField a11;
    ScalarField a12;
    ScalarField a21;
    ScalarField a22;

    MatrixField() = default;
    MatrixField(std::size_t nx, std::size_t ny)
        : a11(nx, ny), a12(nx, ny), a21(nx, ny), a22(nx, ny) {}

    std::size_t nx() const { return a11.nx(); }
    std::size_t ny() const { return a11.ny(); }

    ScalarField trace() const { return a11 + a22; }
};

/// Bilinear interpolation of a field at p in [-1,1]^2. Points within half a
/// cell of the boundary are clamped to the outermost cell centers.
double interpolate_bilinear(const ScalarField& field, const Vec2& p);

/// Average of the fine field over each coarse cell, weighting fine cells by
/// their overlap area with the coarse cell.
ScalarField resample_area(const ScalarField& fine, std::size_t nx, std::size_t ny);

}  // namespace mpirecon
