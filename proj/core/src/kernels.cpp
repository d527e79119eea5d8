#include "mpirecon/kernels.hpp"

#include <array>
#include <cmath>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

constexpr int kSeriesTerms = 14;

// a_n = 4^n B_{2n} / (2n)!, so that coth(z) - 1/z = sum_{n>=1} a_n z^{2n-1}.
std::array<long double, kSeriesTerms> make_series_coefficients() {
    // Bernoulli numbers B_2 .. B_28.
    constexpr std::array<long double, kSeriesTerms> bernoulli = {
        1.0L / 6.0L,
        -1.0L / 30.0L,
        1.0L / 42.0L,
        -1.0L / 30.0L,
        5.0L / 66.0L,
        -691.0L / 2730.0L,
        7.0L / 6.0L,
        -3617.0L / 510.0L,
        43867.0L / 798.0L,
        -174611.0L / 330.0L,
        854513.0L / 138.0L,
        -236364091.0L / 2730.0L,
        8553103.0L / 6.0L,
        -23749461029.0L / 870.0L,
    };
    std::array<long double, kSeriesTerms> a{};
    long double pow4 = 1.0L;
    long double factorial = 1.0L;
    for (int n = 1; n <= kSeriesTerms; ++n) {
        pow4 *= 4.0L;
        factorial *= static_cast<long double>(2 * n - 1) * static_cast<long double>(2 * n);
        a[n - 1] = pow4 * bernoulli[n - 1] / factorial;
    }
    return a;
}

const std::array<long double, kSeriesTerms>& series_coefficients() {
    static const auto a = make_series_coefficients();
    return a;
}

// sum_{n>=1} c_n a_n w^{n-1}, w = z^2, by Horner.
template <typename Weight>
double even_series(double z, Weight weight) {
    const auto& a = series_coefficients();
    const long double w = static_cast<long double>(z) * z;
    long double acc = 0.0L;
    for (int n = kSeriesTerms; n >= 1; --n) acc = acc * w + weight(n) * a[n - 1];
    return static_cast<double>(acc);
}

}  // namespace

void KernelParams::validate() const {
    detail::require(h > 0.0 && std::isfinite(h), "KernelParams: h must be positive");
    detail::require(n == 2 || n == 3, "KernelParams: n must be 2 or 3");
    detail::require(series_threshold > 0.0, "KernelParams: series_threshold must be positive");
}

double langevin(double z, double series_threshold) {
    if (std::abs(z) < series_threshold) return z * even_series(z, [](int) { return 1.0L; });
    return 1.0 / std::tanh(z) - 1.0 / z;
}

double langevin_derivative(double z, double series_threshold) {
    if (std::abs(z) < series_threshold)
        return even_series(z, [](int n) { return static_cast<long double>(2 * n - 1); });
    const double s = std::sinh(z);
    return 1.0 / (z * z) - 1.0 / (s * s);
}

double f1(double z, double series_threshold) {
    if (std::abs(z) < series_threshold) return even_series(z, [](int) { return 1.0L; });
    return langevin(z, series_threshold) / z;
}

double f2(double z, double series_threshold) {
    if (std::abs(z) < series_threshold)
        return even_series(z, [](int n) { return static_cast<long double>(2 * (n - 1)); });
    return langevin_derivative(z, series_threshold) - f1(z, series_threshold);
}

double trace_profile(double z, int n, double series_threshold) {
    return n * f1(z, series_threshold) + f2(z, series_threshold);
}

SymMat2 kernel_matrix(const Vec2& y, const KernelParams& params) {
    const double r = std::hypot(y[0], y[1]);
    const double z = r / params.h;
    const double inv_h = 1.0 / params.h;
    const double iso = inv_h * f1(z, params.series_threshold);
    if (r == 0.0) return {iso, 0.0, iso};
    const double rank_one = inv_h * f2(z, params.series_threshold);
    const double e0 = y[0] / r;
    const double e1 = y[1] / r;
    return {iso + rank_one * e0 * e0, rank_one * e0 * e1, iso + rank_one * e1 * e1};
}

double kernel_trace(const Vec2& y, const KernelParams& params) {
    return kernel_trace_radial(std::hypot(y[0], y[1]), params);
}

double kernel_trace_radial(double r, const KernelParams& params) {
    return trace_profile(r / params.h, params.n, params.series_threshold) / params.h;
}

}  // namespace mpirecon
