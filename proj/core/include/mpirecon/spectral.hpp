#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mpirecon/grid.hpp"

namespace mpirecon {

/// Index (m1, m2) of a tensor-product cosine or sine mode on [-1,1]^2.
struct ModeIndex {
    int m1 = 0;
    int m2 = 0;

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Truncated cosine coefficients: N x M blocks of 2x2 matrices, (k, l) row-major.
class CoeffTensor {
public:
    CoeffTensor() = default;
    CoeffTensor(std::size_t n, std::size_t m);

    std::size_t n() const { return n_; }
    std::size_t m() const { return m_; }
    std::size_t modes() const { return data_.size(); }

    Mat2& operator()(std::size_t k, std::size_t l) { return data_[k * m_ + l]; }
    const Mat2& operator()(std::size_t k, std::size_t l) const { return data_[k * m_ + l]; }
    Mat2& operator[](std::size_t idx) { return data_[idx]; }
    const Mat2& operator[](std::size_t idx) const { return data_[idx]; }

    std::vector<Mat2>& data() { return data_; }
    const std::vector<Mat2>& data() const { return data_; }

    bool same_shape(const CoeffTensor& o) const { return n_ == o.n_ && m_ == o.m_; }

    double frobenius_sq() const;
    CoeffTensor& operator+=(const CoeffTensor& o);
    CoeffTensor& operator-=(const CoeffTensor& o);
    CoeffTensor& operator*=(double s);

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<Mat2> data_;
};

/// Frobenius inner product summed over all modes.
double inner(const CoeffTensor& a, const CoeffTensor& b);

/// Normalizer c_m making the cosine mode unit-norm in L2([-1,1]^2).
double cos_norm(const ModeIndex& m);
/// Normalizer of the sine mode; requires m1, m2 >= 1.
double sin_norm(const ModeIndex& m);

/// Per-axis factor of cos_norm: 1/sqrt(2) for k = 0, else 1.
double cos_axis_norm(int k);

/// d^order/dx^order of cos(pi k (x+1)/2).
double cos_axis_derivative(int k, double x, int order);
/// d^order/dx^order of sin(pi k (x+1)/2).
double sin_axis_derivative(int k, double x, int order);

/// u_m(x, y) = c_m cos(pi m1 (x+1)/2) cos(pi m2 (y+1)/2).
double cos_eval(const ModeIndex& m, double x, double y);
/// v_m(x, y) = c_m sin(pi m1 (x+1)/2) sin(pi m2 (y+1)/2).
double sin_eval(const ModeIndex& m, double x, double y);

/// Closed-form partial derivative d^ox/dx^ox d^oy/dy^oy of u_m.
double cos_derivative(const ModeIndex& m, double x, double y, int ox, int oy);
/// Closed-form partial derivative of v_m.
double sin_derivative(const ModeIndex& m, double x, double y, int ox, int oy);

/// Neumann Laplacian eigenvalue mu_m = (pi^2/4)(m1^2 + m2^2).
double laplace_eigenvalue(const ModeIndex& m);
/// Bi-Laplacian eigenvalue mu_m^2.
double bilaplace_eigenvalue(const ModeIndex& m);

/// Regularizer weight of a mode: mu_m (order 1) or mu_m^2 (order 2).
double regularizer_weight(const ModeIndex& m, int order);

/// Table T[k][p] = cos_axis_norm(k) cos(pi k (x_p + 1)/2), k < modes.
std::vector<double> cos_table(std::size_t modes, const std::vector<double>& coords);

/// A(x_i, y_j) = sum_{k,l} A_kl u_kl(x_i, y_j) at the cell centers of an nx-by-ny grid.
MatrixField synthesize(const CoeffTensor& coeffs, std::size_t nx, std::size_t ny);

/// Scalar version of synthesize for one channel of coefficients (size n*m, row-major).
ScalarField synthesize_scalar(const std::vector<double>& coeffs, std::size_t n, std::size_t m,
                              std::size_t nx, std::size_t ny);

/// Inverse of synthesize when the grid matches the truncation (nx = N, ny = M).
CoeffTensor analyze(const MatrixField& field);

/// Cell-area weighted projection of one scalar channel, square case.
std::vector<double> analyze_scalar(const ScalarField& field);

/// u_m at each point.
std::vector<double> eval_basis_row(const std::vector<Vec2>& points, const ModeIndex& m);

/// Binary format: "MPIC", u32 version = 1, u32 N, u32 M, then N*M*4 float64
/// little-endian in (k, l, row, col) order.
void write_coeffs(const CoeffTensor& coeffs, std::ostream& out);
void save_coeffs(const CoeffTensor& coeffs, const std::string& path);
CoeffTensor read_coeffs(std::istream& in);
CoeffTensor load_coeffs(const std::string& path);

}  // namespace mpirecon
