#include "mpirecon/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "mpirecon/error.hpp"
#include "mpirecon/forward.hpp"

namespace mpirecon {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

std::array<double, kWindow * kWindow> ssim_window() {
    std::array<double, kWindow * kWindow> w{};
    double total = 0.0;
    const int r = kWindow / 2;
    for (int b = 0; b < kWindow; ++b)
        for (int a = 0; a < kWindow; ++a) {
            const double d2 = static_cast<double>((a - r) * (a - r) + (b - r) * (b - r));
            const double v = std::exp(-d2 / (2.0 * kWindowSigma * kWindowSigma));
            w[static_cast<std::size_t>(b * kWindow + a)] = v;
            total += v;
        }
    for (auto& v : w) v /= total;
    return w;
}

std::string format_score(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ScalarField ideal_trace(const ScalarField& rho_gt, const KernelParams& params, std::size_t nx,
                        std::size_t ny) {
    return resample_area(trace_convolution(rho_gt, params), nx, ny);
}

double default_peak(const ScalarField& reference) {
    detail::require(!reference.empty(), "default_peak: empty image");
    return reference.max() - reference.min();
}

double psnr(const ScalarField& x, const ScalarField& y, double peak) {
    detail::require(x.same_shape(y) && !x.empty(), "psnr: images must have the same dimensions");
    detail::require(peak > 0.0 && std::isfinite(peak), "psnr: peak must be positive");
    double se = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) se += (x[k] - y[k]) * (x[k] - y[k]);
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = se / static_cast<double>(x.size());
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const ScalarField& x, const ScalarField& y, double peak) {
    detail::require(x.same_shape(y), "ssim: images must have the same dimensions");
    detail::require(x.nx() >= kWindow && x.ny() >= kWindow, "ssim: images must be at least 11x11");
    detail::require(peak > 0.0 && std::isfinite(peak), "ssim: peak must be positive");
    static const auto window = ssim_window();
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t j0 = 0; j0 + kWindow <= x.ny(); ++j0)
        for (std::size_t i0 = 0; i0 + kWindow <= x.nx(); ++i0) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (std::size_t b = 0; b < kWindow; ++b)
                for (std::size_t a = 0; a < kWindow; ++a) {
                    const double w = window[b * kWindow + a];
                    const double xv = x(i0 + a, j0 + b);
                    const double yv = y(i0 + a, j0 + b);
                    mx += w * xv;
                    my += w * yv;
                    sxx += w * xv * xv;
                    syy += w * yv * yv;
                    sxy += w * xv * yv;
                }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cxy = sxy - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return total / static_cast<double>(count);
}

ScorePair score(const ScalarField& estimate, const ScalarField& reference) {
    const double peak = default_peak(reference);
    detail::require(peak > 0.0, "score: reference image is constant");
    return {psnr(estimate, reference, peak), ssim(estimate, reference, peak)};
}

double total_variation(const ScalarField& f) {
    double tv = 0.0;
    for (std::size_t j = 0; j < f.ny(); ++j)
        for (std::size_t i = 0; i < f.nx(); ++i) {
            if (i + 1 < f.nx()) tv += std::abs(f(i + 1, j) - f(i, j));
            if (j + 1 < f.ny()) tv += std::abs(f(i, j + 1) - f(i, j));
        }
    return tv;
}

void write_score_header(std::ostream& out) { out << "phantom,stage,order,psnr,ssim\n"; }

void write_score_row(std::ostream& out, const std::string& phantom, const std::string& stage,
                     int order, const ScorePair& scores) {
    out << phantom << ',' << stage << ',' << order << ',' << format_score(scores.psnr) << ','
        << format_score(scores.ssim) << '\n';
}

}  // namespace mpirecon
