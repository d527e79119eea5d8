#include "mpirecon/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

constexpr double kPi = std::numbers::pi;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> centers(std::size_t n) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = cell_center(i, n);
    return c;
}

// Table of normalized 1D cosines: rows are modes, columns are grid points.
RowMatrix axis_table(std::size_t modes, std::size_t n) {
    const auto t = cos_table(modes, centers(n));
    return Eigen::Map<const RowMatrix>(t.data(), static_cast<Eigen::Index>(modes),
                                       static_cast<Eigen::Index>(n));
}

// Field (nx x ny, x fastest) = Tx^T C Ty with C the N x M channel.
ScalarField synthesize_channel(const RowMatrix& c, const RowMatrix& tx, const RowMatrix& ty) {
    const Eigen::MatrixXd f = tx.transpose() * c * ty;  // nx x ny, column-major
    ScalarField out(static_cast<std::size_t>(f.rows()), static_cast<std::size_t>(f.cols()));
    Eigen::Map<Eigen::MatrixXd>(out.values().data(), f.rows(), f.cols()) = f;
    return out;
}

RowMatrix analyze_channel(const ScalarField& field, const RowMatrix& tx, const RowMatrix& ty) {
    const Eigen::Map<const Eigen::MatrixXd> f(field.values().data(),
                                              static_cast<Eigen::Index>(field.nx()),
                                              static_cast<Eigen::Index>(field.ny()));
    return field.cell_area() * (tx * f * ty.transpose());
}

double axis_derivative(bool is_cos, int k, double x, int order) {
    detail::require(order >= 0, "derivative order must be non-negative");
    const double a = kPi * k / 2.0;
    const double theta = a * (x + 1.0);
    const double scale = std::pow(a, order);
    // Each derivative advances the phase by a quarter period.
    const int phase = (order + (is_cos ? 0 : 3)) % 4;
    switch (phase) {
    case 0: return scale * std::cos(theta);
    case 1: return -scale * std::sin(theta);
    case 2: return -scale * std::cos(theta);
    default: return scale * std::sin(theta);
    }
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("coefficient file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("coefficient file truncated");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

CoeffTensor::CoeffTensor(std::size_t n, std::size_t m) : n_(n), m_(m), data_(n * m) {}

double CoeffTensor::frobenius_sq() const {
    double s = 0.0;
    for (const auto& a : data_) s += a.frobenius_sq();
    return s;
}

CoeffTensor& CoeffTensor::operator+=(const CoeffTensor& o) {
    detail::require(same_shape(o), "CoeffTensor: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i].a11 += o.data_[i].a11;
        data_[i].a12 += o.data_[i].a12;
        data_[i].a21 += o.data_[i].a21;
        data_[i].a22 += o.data_[i].a22;
    }
    return *this;
}

CoeffTensor& CoeffTensor::operator-=(const CoeffTensor& o) {
    detail::require(same_shape(o), "CoeffTensor: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i].a11 -= o.data_[i].a11;
        data_[i].a12 -= o.data_[i].a12;
        data_[i].a21 -= o.data_[i].a21;
        data_[i].a22 -= o.data_[i].a22;
    }
    return *this;
}

CoeffTensor& CoeffTensor::operator*=(double s) {
    for (auto& a : data_) {
        a.a11 *= s;
        a.a12 *= s;
        a.a21 *= s;
        a.a22 *= s;
    }
    return *this;
}

double inner(const CoeffTensor& a, const CoeffTensor& b) {
    detail::require(a.same_shape(b), "inner: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.modes(); ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        s += x.a11 * y.a11 + x.a12 * y.a12 + x.a21 * y.a21 + x.a22 * y.a22;
    }
    return s;
}

double cos_axis_norm(int k) { return k == 0 ? std::numbers::sqrt2 / 2.0 : 1.0; }

double cos_norm(const ModeIndex& m) {
    detail::require(m.m1 >= 0 && m.m2 >= 0, "cos_norm: negative mode index");
    return cos_axis_norm(m.m1) * cos_axis_norm(m.m2);
}

double sin_norm(const ModeIndex& m) {
    detail::require(m.m1 >= 1 && m.m2 >= 1, "sin_norm: sine modes start at 1");
    return 1.0;
}

double cos_axis_derivative(int k, double x, int order) { return axis_derivative(true, k, x, order); }
double sin_axis_derivative(int k, double x, int order) { return axis_derivative(false, k, x, order); }

double cos_eval(const ModeIndex& m, double x, double y) { return cos_derivative(m, x, y, 0, 0); }
double sin_eval(const ModeIndex& m, double x, double y) { return sin_derivative(m, x, y, 0, 0); }

double cos_derivative(const ModeIndex& m, double x, double y, int ox, int oy) {
    return cos_norm(m) * cos_axis_derivative(m.m1, x, ox) * cos_axis_derivative(m.m2, y, oy);
}

double sin_derivative(const ModeIndex& m, double x, double y, int ox, int oy) {
    return sin_norm(m) * sin_axis_derivative(m.m1, x, ox) * sin_axis_derivative(m.m2, y, oy);
}

double laplace_eigenvalue(const ModeIndex& m) {
    return kPi * kPi / 4.0 * (static_cast<double>(m.m1) * m.m1 + static_cast<double>(m.m2) * m.m2);
}

double bilaplace_eigenvalue(const ModeIndex& m) {
    const double mu = laplace_eigenvalue(m);
    return mu * mu;
}

double regularizer_weight(const ModeIndex& m, int order) {
    detail::require(order == 1 || order == 2, "regularizer order must be 1 or 2");
    return order == 1 ? laplace_eigenvalue(m) : bilaplace_eigenvalue(m);
}

std::vector<double> cos_table(std::size_t modes, const std::vector<double>& coords) {
    const std::size_t n = coords.size();
    std::vector<double> t(modes * n);
    for (std::size_t k = 0; k < modes; ++k) {
        const double c = cos_axis_norm(static_cast<int>(k));
        const double a = kPi * static_cast<double>(k) / 2.0;
        for (std::size_t p = 0; p < n; ++p) t[k * n + p] = c * std::cos(a * (coords[p] + 1.0));
    }
    return t;
}

MatrixField synthesize(const CoeffTensor& coeffs, std::size_t nx, std::size_t ny) {
    detail::require(coeffs.modes() > 0 && nx > 0 && ny > 0, "synthesize: empty input");
    const auto tx = axis_table(coeffs.n(), nx);
    const auto ty = axis_table(coeffs.m(), ny);
    const auto rows = static_cast<Eigen::Index>(coeffs.n());
    const auto cols = static_cast<Eigen::Index>(coeffs.m());
    RowMatrix c11(rows, cols), c12(rows, cols), c21(rows, cols), c22(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k)
        for (Eigen::Index l = 0; l < cols; ++l) {
            const auto& a = coeffs(static_cast<std::size_t>(k), static_cast<std::size_t>(l));
            c11(k, l) = a.a11;
            c12(k, l) = a.a12;
            c21(k, l) = a.a21;
            c22(k, l) = a.a22;
        }
    MatrixField out;
    out.a11 = synthesize_channel(c11, tx, ty);
    out.a12 = synthesize_channel(c12, tx, ty);
    out.a21 = synthesize_channel(c21, tx, ty);
    out.a22 = synthesize_channel(c22, tx, ty);
    return out;
}

ScalarField synthesize_scalar(const std::vector<double>& coeffs, std::size_t n, std::size_t m,
                              std::size_t nx, std::size_t ny) {
    detail::require(coeffs.size() == n * m && n > 0 && m > 0, "synthesize_scalar: size mismatch");
    const RowMatrix c = Eigen::Map<const RowMatrix>(coeffs.data(), static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(m));
    return synthesize_channel(c, axis_table(n, nx), axis_table(m, ny));
}

CoeffTensor analyze(const MatrixField& field) {
    const std::size_t nx = field.nx();
    const std::size_t ny = field.ny();
    detail::require(nx > 0 && ny > 0, "analyze: empty field");
    const auto tx = axis_table(nx, nx);
    const auto ty = axis_table(ny, ny);
    const auto c11 = analyze_channel(field.a11, tx, ty);
    const auto c12 = analyze_channel(field.a12, tx, ty);
    const auto c21 = analyze_channel(field.a21, tx, ty);
    const auto c22 = analyze_channel(field.a22, tx, ty);
    CoeffTensor out(nx, ny);
    for (std::size_t k = 0; k < nx; ++k)
        for (std::size_t l = 0; l < ny; ++l) {
            const auto ki = static_cast<Eigen::Index>(k);
            const auto li = static_cast<Eigen::Index>(l);
            out(k, l) = {c11(ki, li), c12(ki, li), c21(ki, li), c22(ki, li)};
        }
    return out;
}

std::vector<double> analyze_scalar(const ScalarField& field) {
    detail::require(!field.empty(), "analyze_scalar: empty field");
    const auto c = analyze_channel(field, axis_table(field.nx(), field.nx()),
                                   axis_table(field.ny(), field.ny()));
    return {c.data(), c.data() + c.size()};
}

std::vector<double> eval_basis_row(const std::vector<Vec2>& points, const ModeIndex& m) {
    std::vector<double> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) out[p] = cos_eval(m, points[p][0], points[p][1]);
    return out;
}

void write_coeffs(const CoeffTensor& coeffs, std::ostream& out) {
    out.write("MPIC", 4);
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(coeffs.n()));
    put_u32(out, static_cast<std::uint32_t>(coeffs.m()));
    for (const auto& a : coeffs.data()) {
        put_f64(out, a.a11);
        put_f64(out, a.a12);
        put_f64(out, a.a21);
        put_f64(out, a.a22);
    }
}

void save_coeffs(const CoeffTensor& coeffs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_coeffs(coeffs, out);
    if (!out) throw IoError("failed writing " + path);
}

CoeffTensor read_coeffs(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "MPIC", 4) != 0)
        throw IoError("not a coefficient file");
    if (get_u32(in) != 1) throw IoError("unsupported coefficient file version");
    const std::uint32_t n = get_u32(in);
    const std::uint32_t m = get_u32(in);
    if (n == 0 || m == 0 || n > 65536 || m > 65536) throw IoError("invalid coefficient dimensions");
    CoeffTensor out(n, m);
    for (auto& a : out.data()) {
        a.a11 = get_f64(in);
        a.a12 = get_f64(in);
        a.a21 = get_f64(in);
        a.a22 = get_f64(in);
    }
    return out;
}

CoeffTensor load_coeffs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_coeffs(in);
}

}  // namespace mpirecon
