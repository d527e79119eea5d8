#include "mpirecon/theory_checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>

#include "mpirecon/error.hpp"
#include "mpirecon/rng.hpp"

namespace mpirecon {

namespace {

constexpr double kPi = std::numbers::pi;

struct Sampler {
    SeededGenerator gen;
    explicit Sampler(std::uint64_t seed) : gen(seed) {}
    Vec2 interior() { return {2.0 * gen.uniform_open() - 1.0, 2.0 * gen.uniform_open() - 1.0}; }
};

// Evenly spaced points along the four edges, corners included.
struct EdgePoint {
    Vec2 p;
    int edge;  // 0: x=-1, 1: x=1, 2: y=-1, 3: y=1
};

std::vector<EdgePoint> edge_points(int per_edge) {
    std::vector<EdgePoint> pts;
    for (int k = 0; k < per_edge; ++k) {
        const double t = per_edge == 1 ? 0.0 : -1.0 + 2.0 * k / (per_edge - 1);
        pts.push_back({{-1.0, t}, 0});
        pts.push_back({{1.0, t}, 1});
        pts.push_back({{t, -1.0}, 2});
        pts.push_back({{t, 1.0}, 3});
    }
    return pts;
}

// Outward normal derivative given the partial derivatives along x and y.
double outward(int edge, double dx, double dy) {
    switch (edge) {
    case 0: return -dx;
    case 1: return dx;
    case 2: return -dy;
    default: return dy;
    }
}

std::string mode_name(const ModeIndex& m) {
    return "(" + std::to_string(m.m1) + "," + std::to_string(m.m2) + ")";
}

using Derivative = std::function<double(double, double, int, int)>;

double laplacian(const Derivative& d, double x, double y) { return d(x, y, 2, 0) + d(x, y, 0, 2); }

double bilaplacian(const Derivative& d, double x, double y) {
    return d(x, y, 4, 0) + 2.0 * d(x, y, 2, 2) + d(x, y, 0, 4);
}

// d^k/dt^k cosh(a (t+1)).
double cosh_axis_derivative(double a, double t, int order) {
    const double s = std::pow(a, order);
    return order % 2 == 0 ? s * std::cosh(a * (t + 1.0)) : s * std::sinh(a * (t + 1.0));
}

}  // namespace

double CheckReport::max_residual() const {
    double m = 0.0;
    for (const auto& [name, value] : residuals) {
        if (!std::isfinite(value)) return value;
        m = std::max(m, value);
    }
    return m;
}

void CheckReport::finalize() {
    passed = std::all_of(residuals.begin(), residuals.end(), [this](const auto& r) {
        return std::isfinite(r.second) && r.second <= tolerance;
    });
}

CheckReport check_neumann_laplace_eigen(const ModeIndex& m, int num_points, double tolerance,
                                        std::optional<double> eigenvalue_override,
                                        std::uint64_t seed) {
    detail::require(m.m1 >= 0 && m.m2 >= 0 && num_points > 0, "check_neumann_laplace_eigen: bad input");
    const double mu = eigenvalue_override.value_or(laplace_eigenvalue(m));
    const Derivative d = [&](double x, double y, int ox, int oy) {
        return cos_derivative(m, x, y, ox, oy);
    };
    Sampler s(seed);
    double pde = 0.0;
    for (int k = 0; k < num_points; ++k) {
        const auto p = s.interior();
        pde = std::max(pde, std::abs(-laplacian(d, p[0], p[1]) - mu * d(p[0], p[1], 0, 0)));
    }
    double bc = 0.0;
    for (const auto& e : edge_points(num_points))
        bc = std::max(bc, std::abs(outward(e.edge, d(e.p[0], e.p[1], 1, 0), d(e.p[0], e.p[1], 0, 1))));
    CheckReport r{"neumann_laplace" + mode_name(m), {{"pde", pde}, {"neumann", bc}}, tolerance, false, {}};
    if (eigenvalue_override) r.note = "eigenvalue overridden";
    r.finalize();
    return r;
}

CheckReport check_bilap_neumann_eigen(const ModeIndex& m, int num_points, double tolerance,
                                      std::uint64_t seed) {
    detail::require(m.m1 >= 0 && m.m2 >= 0 && num_points > 0, "check_bilap_neumann_eigen: bad input");
    const double mu2 = bilaplace_eigenvalue(m);
    const Derivative d = [&](double x, double y, int ox, int oy) {
        return cos_derivative(m, x, y, ox, oy);
    };
    Sampler s(seed);
    double pde = 0.0;
    for (int k = 0; k < num_points; ++k) {
        const auto p = s.interior();
        pde = std::max(pde, std::abs(bilaplacian(d, p[0], p[1]) - mu2 * d(p[0], p[1], 0, 0)));
    }
    double bc_u = 0.0;
    double bc_lap = 0.0;
    for (const auto& e : edge_points(num_points)) {
        const double x = e.p[0];
        const double y = e.p[1];
        bc_u = std::max(bc_u, std::abs(outward(e.edge, d(x, y, 1, 0), d(x, y, 0, 1))));
        const double lap_x = d(x, y, 3, 0) + d(x, y, 1, 2);
        const double lap_y = d(x, y, 2, 1) + d(x, y, 0, 3);
        bc_lap = std::max(bc_lap, std::abs(outward(e.edge, lap_x, lap_y)));
    }
    CheckReport r{"bilaplace_neumann" + mode_name(m),
                  {{"pde", pde}, {"neumann_u", bc_u}, {"neumann_laplace_u", bc_lap}},
                  tolerance, false, {}};
    r.finalize();
    return r;
}

CheckReport check_dirichlet_variants(const ModeIndex& m, double tolerance, std::uint64_t seed) {
    detail::require(m.m1 >= 1 && m.m2 >= 1, "check_dirichlet_variants: modes start at 1");
    const double mu = laplace_eigenvalue(m);
    const Derivative d = [&](double x, double y, int ox, int oy) {
        return sin_derivative(m, x, y, ox, oy);
    };
    Sampler s(seed);
    double lap = 0.0;
    double bilap = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto p = s.interior();
        const double v = d(p[0], p[1], 0, 0);
        lap = std::max(lap, std::abs(-laplacian(d, p[0], p[1]) - mu * v));
        bilap = std::max(bilap, std::abs(bilaplacian(d, p[0], p[1]) - mu * mu * v));
    }
    double trace = 0.0;
    double lap_trace = 0.0;
    for (const auto& e : edge_points(100)) {
        trace = std::max(trace, std::abs(d(e.p[0], e.p[1], 0, 0)));
        lap_trace = std::max(lap_trace, std::abs(laplacian(d, e.p[0], e.p[1])));
    }
    CheckReport r{"dirichlet_sine" + mode_name(m),
                  {{"laplace_pde", lap},
                   {"bilaplace_pde", bilap},
                   {"dirichlet_v", trace},
                   {"dirichlet_laplace_v", lap_trace}},
                  tolerance, false, {}};
    r.finalize();
    return r;
}

CheckReport check_harmonic_kernel(int n_max, double tolerance, std::size_t quad, std::uint64_t seed) {
    detail::require(n_max >= 2 && quad >= 8, "check_harmonic_kernel: need n_max >= 2");
    Sampler s(seed);
    double lap = 0.0;
    double lap_grad = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double a = kPi * n / 2.0;
        const auto d = [&](double x, double y, int ox, int oy) {
            return cos_axis_derivative(n, x, ox) * cosh_axis_derivative(a, y, oy);
        };
        for (int k = 0; k < 100; ++k) {
            const auto p = s.interior();
            const double xx = d(p[0], p[1], 2, 0);
            const double yy = d(p[0], p[1], 0, 2);
            const double scale = std::max({1.0, std::abs(xx), std::abs(yy)});
            lap = std::max(lap, std::abs(xx + yy) / scale);
        }
        for (const auto& e : edge_points(50)) {
            const double x = e.p[0];
            const double y = e.p[1];
            const double gx = d(x, y, 3, 0) + d(x, y, 1, 2);
            const double gy = d(x, y, 2, 1) + d(x, y, 0, 3);
            const double scale = std::max({1.0, std::abs(d(x, y, 3, 0)), std::abs(d(x, y, 2, 1))});
            lap_grad = std::max(lap_grad, std::abs(outward(e.edge, gx, gy)) / scale);
        }
    }
    // Midpoint quadrature of the Gram matrix on a quad x quad grid.
    const auto nq = static_cast<Eigen::Index>(quad);
    Eigen::MatrixXd values(nq * nq, n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double a = kPi * n / 2.0;
        for (Eigen::Index j = 0; j < nq; ++j)
            for (Eigen::Index i = 0; i < nq; ++i) {
                const double x = cell_center(static_cast<std::size_t>(i), quad);
                const double y = cell_center(static_cast<std::size_t>(j), quad);
                values(j * nq + i, n) = std::cos(a * (x + 1.0)) * std::cosh(a * (y + 1.0));
            }
    }
    const Eigen::MatrixXd gram = values.transpose() * values;
    double ortho = 0.0;
    for (int p = 0; p <= n_max; ++p)
        for (int q = p + 1; q <= n_max; ++q)
            ortho = std::max(ortho, std::abs(gram(p, q)) / std::sqrt(gram(p, p) * gram(q, q)));
    CheckReport r{"harmonic_kernel",
                  {{"laplace_relative", lap}, {"normal_laplace_relative", lap_grad}, {"orthogonality", ortho}},
                  tolerance, false,
                  "constructive half only; nonexistence of separable eigenfunctions is not sampled"};
    r.finalize();
    return r;
}

CheckReport check_kernel_separable_family(const std::vector<double>& omega_values, double tolerance,
                                          std::uint64_t seed) {
    Sampler s(seed);
    CheckReport r{"separable_kernel_family", {}, tolerance, false,
                  "mu = 0 family only; mu > 0 nonexistence is not sampled"};
    for (double w : omega_values) {
        // Factors f(x) and g(y) with their second derivatives.
        using Factor = std::function<std::array<double, 2>(double)>;
        std::vector<std::pair<std::string, std::pair<Factor, Factor>>> terms;
        if (w == 0.0) {
            const Factor one = [](double) { return std::array<double, 2>{1.0, 0.0}; };
            const Factor lin = [](double t) { return std::array<double, 2>{t, 0.0}; };
            terms = {{"1*1", {one, one}}, {"x*1", {lin, one}}, {"1*y", {one, lin}}, {"x*y", {lin, lin}}};
        } else {
            const Factor c = [w](double t) {
                return std::array<double, 2>{std::cos(w * t), -w * w * std::cos(w * t)};
            };
            const Factor sn = [w](double t) {
                return std::array<double, 2>{std::sin(w * t), -w * w * std::sin(w * t)};
            };
            const Factor ch = [w](double t) {
                return std::array<double, 2>{std::cosh(w * t), w * w * std::cosh(w * t)};
            };
            const Factor sh = [w](double t) {
                return std::array<double, 2>{std::sinh(w * t), w * w * std::sinh(w * t)};
            };
            terms = {{"cos*cosh", {c, ch}}, {"sin*cosh", {sn, ch}},
                     {"cos*sinh", {c, sh}}, {"sin*sinh", {sn, sh}}};
        }
        char label[48];
        for (const auto& [name, fg] : terms) {
            double worst = 0.0;
            for (int k = 0; k < 100; ++k) {
                const auto p = s.interior();
                const auto f = fg.first(p[0]);
                const auto g = fg.second(p[1]);
                const double xx = f[1] * g[0];
                const double yy = f[0] * g[1];
                const double scale = std::max({1.0, std::abs(xx), std::abs(yy)});
                worst = std::max(worst, std::abs(xx + yy) / scale);
            }
            std::snprintf(label, sizeof label, "omega=%g:", w);
            r.residuals.emplace_back(label + name, worst);
        }
    }
    r.finalize();
    return r;
}

CheckReport check_r2_equals_r3(int num_trials, int band, double tolerance, std::uint64_t seed) {
    detail::require(band >= 1 && band <= 32 && num_trials >= 1, "check_r2_equals_r3: bad input");
    const auto q = static_cast<std::size_t>(std::max(8 * band, 64));
    std::vector<double> xs(q);
    for (std::size_t i = 0; i < q; ++i) xs[i] = cell_center(i, q);
    const auto nb = static_cast<Eigen::Index>(band);
    const auto nq = static_cast<Eigen::Index>(q);
    // Axis tables of normalized cosines and their derivatives: D[k](mode, point).
    std::array<Eigen::MatrixXd, 3> tab;
    for (int order = 0; order < 3; ++order) {
        tab[static_cast<std::size_t>(order)].resize(nb, nq);
        for (Eigen::Index k = 0; k < nb; ++k)
            for (Eigen::Index i = 0; i < nq; ++i)
                tab[static_cast<std::size_t>(order)](k, i) =
                    cos_axis_norm(static_cast<int>(k)) *
                    cos_axis_derivative(static_cast<int>(k), xs[static_cast<std::size_t>(i)], order);
    }
    const double area = 4.0 / static_cast<double>(q * q);
    const double norm = 1.0 / (2.0 * 4.0);
    Sampler s(seed);
    double gap_r2r3 = 0.0;
    double gap_spectral = 0.0;
    for (int t = 0; t < num_trials; ++t) {
        Eigen::MatrixXd c(nb, nb);
        double spectral = 0.0;
        for (Eigen::Index k = 0; k < nb; ++k)
            for (Eigen::Index l = 0; l < nb; ++l) {
                c(k, l) = s.gen.normal_pair()[0];
                spectral += bilaplace_eigenvalue({static_cast<int>(k), static_cast<int>(l)}) * c(k, l) * c(k, l);
            }
        spectral *= norm;
        const Eigen::MatrixXd uxx = tab[2].transpose() * c * tab[0];
        const Eigen::MatrixXd uyy = tab[0].transpose() * c * tab[2];
        const Eigen::MatrixXd uxy = tab[1].transpose() * c * tab[1];
        const double r2 = norm * area * (uxx + uyy).squaredNorm();
        const double r3 = norm * area * (uxx.squaredNorm() + 2.0 * uxy.squaredNorm() + uyy.squaredNorm());
        const double scale = std::max({std::abs(r2), std::abs(r3), std::abs(spectral), 1e-300});
        gap_r2r3 = std::max(gap_r2r3, std::abs(r2 - r3) / scale);
        gap_spectral = std::max(gap_spectral, std::max(std::abs(r2 - spectral), std::abs(r3 - spectral)) / scale);
    }
    CheckReport r{"r2_equals_r3",
                  {{"relative_r2_r3", gap_r2r3}, {"relative_spectral", gap_spectral}},
                  tolerance, false, {}};
    r.finalize();
    return r;
}

CheckReport check_r3_boundary_term(const ModeIndex& m, double tolerance) {
    detail::require(m.m1 >= 0 && m.m2 >= 0, "check_r3_boundary_term: bad mode");
    const auto d = [&](double x, double y, int ox, int oy) { return cos_derivative(m, x, y, ox, oy); };
    double tangential = 0.0;
    double total = 0.0;
    for (const auto& e : edge_points(200)) {
        const double x = e.p[0];
        const double y = e.p[1];
        // tau^T d_tau (H u nu): -u_xyy, u_xyy, -u_xxy, u_xxy on the four edges.
        const double tt = e.edge < 2 ? outward(e.edge, d(x, y, 1, 2), 0.0)
                                     : outward(e.edge, 0.0, d(x, y, 2, 1));
        const double nl = outward(e.edge, d(x, y, 3, 0) + d(x, y, 1, 2), d(x, y, 2, 1) + d(x, y, 0, 3));
        tangential = std::max(tangential, std::abs(tt));
        total = std::max(total, std::abs(tt + nl));
    }
    CheckReport r{"r3_boundary" + mode_name(m), {{"tangential_term", tangential}, {"boundary_expression", total}},
                  tolerance, false, {}};
    r.finalize();
    return r;
}

CheckReport check_derivative_consistency(const ModeIndex& m, double tolerance, std::uint64_t seed) {
    detail::require(m.m1 >= 0 && m.m2 >= 0, "check_derivative_consistency: bad mode");
    const double step = 1e-3;
    Sampler s(seed);
    double worst = 0.0;
    const double a = kPi * std::max(m.m1, m.m2) / 2.0;
    for (int k = 0; k < 50; ++k) {
        auto p = s.interior();
        // Keep the stencil inside the domain.
        p[0] = std::clamp(p[0], -1.0 + 3 * step, 1.0 - 3 * step);
        p[1] = std::clamp(p[1], -1.0 + 3 * step, 1.0 - 3 * step);
        for (int ox = 0; ox < 4; ++ox)
            for (int oy = 0; ox + oy < 4; ++oy) {
                const auto f = [&](double x, double y) { return cos_derivative(m, x, y, ox, oy); };
                const double fdx = (-f(p[0] + 2 * step, p[1]) + 8 * f(p[0] + step, p[1]) -
                                    8 * f(p[0] - step, p[1]) + f(p[0] - 2 * step, p[1])) / (12 * step);
                const double fdy = (-f(p[0], p[1] + 2 * step) + 8 * f(p[0], p[1] + step) -
                                    8 * f(p[0], p[1] - step) + f(p[0], p[1] - 2 * step)) / (12 * step);
                const double scale = std::max(1.0, std::pow(a, ox + oy + 1));
                worst = std::max(worst, std::abs(fdx - cos_derivative(m, p[0], p[1], ox + 1, oy)) / scale);
                worst = std::max(worst, std::abs(fdy - cos_derivative(m, p[0], p[1], ox, oy + 1)) / scale);
            }
    }
    CheckReport r{"derivative_consistency" + mode_name(m), {{"finite_difference_relative", worst}},
                  tolerance, false, {}};
    r.finalize();
    return r;
}

std::vector<CheckReport> run_theory_suite(const TheorySuiteOptions& o) {
    detail::require(o.max_mode >= 0 && o.points > 0, "run_theory_suite: bad options");
    std::vector<CheckReport> out;
    for (int m1 = 0; m1 <= o.max_mode; ++m1)
        for (int m2 = 0; m2 <= o.max_mode; ++m2) {
            const ModeIndex m{m1, m2};
            out.push_back(check_neumann_laplace_eigen(m, o.points, o.tolerance));
            out.push_back(check_bilap_neumann_eigen(m, o.points, o.tolerance));
            out.push_back(check_r3_boundary_term(m, o.tolerance));
            out.push_back(check_derivative_consistency(m, std::max(o.tolerance, 1e-6)));
            if (m1 >= 1 && m2 >= 1) out.push_back(check_dirichlet_variants(m, o.tolerance));
        }
    out.push_back(check_harmonic_kernel(o.harmonic_n_max, o.tolerance));
    out.push_back(check_kernel_separable_family({0.0, 0.5, 1.7, kPi, 4.0}, o.tolerance));
    out.push_back(check_r2_equals_r3(o.r2r3_trials, o.r2r3_band, o.tolerance));
    return out;
}

void write_reports_csv(const std::vector<CheckReport>& reports, std::ostream& out) {
    out << "name,passed,max_residual,tolerance,note\n";
    char buf[64];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.6e,%.1e", r.max_residual(), r.tolerance);
        out << r.name << ',' << (r.passed ? "true" : "false") << ',' << buf << ',' << '"' << r.note << '"' << '\n';
    }
}

void print_reports_table(const std::vector<CheckReport>& reports, std::ostream& out) {
    std::size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %-6s  %-12s  %s\n", static_cast<int>(width), "check", "status",
                  "max_residual", "tolerance");
    out << buf;
    std::size_t failed = 0;
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-*s  %-6s  %-12.3e  %.1e\n", static_cast<int>(width), r.name.c_str(),
                      r.passed ? "ok" : "FAIL", r.max_residual(), r.tolerance);
        out << buf;
        if (!r.passed) ++failed;
    }
    out << reports.size() - failed << " of " << reports.size() << " checks passed\n";
}

}  // namespace mpirecon
