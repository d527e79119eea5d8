#include "mpirecon/deconv_stage.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "mpirecon/error.hpp"
#include "mpirecon/phantom.hpp"

namespace mpirecon {

namespace fs = std::filesystem;

namespace {

// Solves (op + shift) x = b by CG, op given as a symmetric positive semidefinite map.
template <class Apply>
TikhonovResult conjugate_gradients(const Apply& apply, const ScalarField& b, ScalarField x,
                                   double tol, int max_iter) {
    TikhonovResult res;
    const double b_norm = norm(b);
    ScalarField r = b - apply(x);
    double r_norm = norm(r);
    if (b_norm == 0.0) {
        if (r_norm == 0.0) {
            res.rho = std::move(x);
            res.converged = true;
            return res;
        }
    }
    const double scale = b_norm > 0.0 ? b_norm : r_norm;
    ScalarField p = r;
    double rr = r_norm * r_norm;
    int it = 0;
    while (r_norm > tol * scale && it < max_iter) {
        const ScalarField ap = apply(p);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0)) break;
        const double alpha = rr / curvature;
        for (std::size_t k = 0; k < x.size(); ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        const double rr_next = dot(r, r);
        r_norm = std::sqrt(rr_next);
        const double beta = rr_next / rr;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
        rr = rr_next;
        ++it;
        if (!std::isfinite(r_norm)) throw NumericalError("CG: non-finite residual");
    }
    res.rho = std::move(x);
    res.iterations = it;
    res.relative_residual = r_norm / scale;
    res.converged = r_norm <= tol * scale;
    return res;
}

// Half-sample symmetric reflection into [0, n).
long reflect(long i, long n) {
    const long period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_taps(double sigma_cells) {
    const long radius = static_cast<long>(std::ceil(4.0 * sigma_cells));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long d = -radius; d <= radius; ++d) {
        const double w = std::exp(-0.5 * (d / sigma_cells) * (d / sigma_cells));
        taps[static_cast<std::size_t>(d + radius)] = w;
        total += w;
    }
    for (auto& w : taps) w /= total;
    return taps;
}

std::string read_tail(const fs::path& path, std::size_t max_bytes = 2000) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::stringstream ss;
    ss << in.rdbuf();
    auto s = ss.str();
    return s.size() > max_bytes ? s.substr(s.size() - max_bytes) : s;
}

ScalarField run_external(const ScalarField& rho, double sigma, const DenoiserSpec& spec) {
    if (spec.command.empty()) throw InvalidArgument("external denoiser: no command configured");
    fs::path dir;
    bool temporary = false;
    if (spec.exchange_dir.empty()) {
        std::string tmpl = (fs::temp_directory_path() / "mpirecon-denoise-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw IoError("external denoiser: cannot create exchange directory");
        dir = tmpl;
        temporary = true;
    } else {
        dir = spec.exchange_dir;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("external denoiser: cannot create " + dir.string());
    }
    struct Cleanup {
        fs::path dir;
        bool active;
        ~Cleanup() {
            std::error_code ec;
            if (active) fs::remove_all(dir, ec);
        }
    } cleanup{dir, temporary};

    fs::remove(dir / "out.pgm");
    fs::remove(dir / "out.range");
    save_field(rho, (dir / "in.pgm").string());
    {
        std::ofstream out(dir / "sigma");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", sigma);
        out << buf << '\n';
        if (!out) throw IoError("external denoiser: cannot write sigma file");
    }
    const fs::path log = dir / "denoiser.log";
    const pid_t pid = fork();
    if (pid < 0) throw IoError(std::string("external denoiser: fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        const int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd >= 0) {
            dup2(fd, STDOUT_FILENO);
            dup2(fd, STDERR_FILENO);
            close(fd);
        }
        execl(spec.command.c_str(), spec.command.c_str(), dir.c_str(), static_cast<char*>(nullptr));
        std::fprintf(stderr, "exec failed: %s\n", std::strerror(errno));
        _exit(127);
    }
    const auto deadline = std::chrono::steady_clock::now() + spec.timeout;
    int status = 0;
    for (;;) {
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0 && errno != EINTR)
            throw IoError(std::string("external denoiser: waitpid failed: ") + std::strerror(errno));
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw IoError("external denoiser: timed out after " +
                          std::to_string(spec.timeout.count()) + " ms: " + spec.command);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw IoError("external denoiser: '" + spec.command + "' failed with status " +
                      std::to_string(code) + "; output: " + read_tail(log));
    }
    if (!fs::exists(dir / "out.pgm"))
        throw IoError("external denoiser: command did not produce out.pgm");
    auto out = load_field((dir / "out.pgm").string());
    if (!out.same_shape(rho)) throw IoError("external denoiser: out.pgm has the wrong dimensions");
    return out;
}

}  // namespace

void DeconvProblem::validate() const {
    detail::require(!u.empty(), "DeconvProblem: empty trace data");
    detail::require(u.nx() >= 8 && u.ny() >= 8, "DeconvProblem: grid must be at least 8x8");
    params.validate();
    detail::require(std::isfinite(mu) && mu > 0.0, "DeconvProblem: mu must be positive");
    detail::require(std::isfinite(nu0) && nu0 > 0.0, "DeconvProblem: nu0 must be positive");
    detail::require(iters >= 1, "DeconvProblem: iters must be at least 1");
    detail::require(cg_tol > 0.0 && cg_max_iter > 0, "DeconvProblem: invalid CG settings");
    detail::require(denoiser.blur_factor >= 0.0, "DeconvProblem: blur factor must be non-negative");
}

LinearConvolution build_convolution_operator(const KernelParams& params, std::size_t nx,
                                             std::size_t ny) {
    params.validate();
    detail::require(nx >= 8 && ny >= 8, "build_convolution_operator: grid must be at least 8x8");
    const double dx = 2.0 / static_cast<double>(nx);
    const double dy = 2.0 / static_cast<double>(ny);
    return LinearConvolution(nx, ny, [params, dx, dy](long di, long dj) {
        return dx * dy * kernel_trace({di * dx, dj * dy}, params);
    });
}

TikhonovResult tikhonov_step(const ScalarField& u, const ScalarField& rho2, double nu,
                             const LinearConvolution& op, double tol, int max_iter) {
    detail::require(std::isfinite(nu) && nu > 0.0, "tikhonov_step: nu must be positive");
    detail::require(u.nx() == op.nx() && u.ny() == op.ny() && rho2.same_shape(u),
                    "tikhonov_step: shape mismatch");
    ScalarField rhs = op.adjoint(u);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += nu * rho2[k];
    const auto apply = [&](const ScalarField& x) {
        ScalarField y = op.adjoint(op.apply(x));
        for (std::size_t k = 0; k < y.size(); ++k) y[k] += nu * x[k];
        return y;
    };
    return conjugate_gradients(apply, rhs, rho2, tol, max_iter);
}

double estimate_sigma(const ScalarField& rho) {
    detail::require(!rho.empty(), "estimate_sigma: empty field");
    // Shifted by the first sample so that constant fields give exactly zero.
    const double n = static_cast<double>(rho.size());
    const double shift = rho[0];
    double sum = 0.0;
    for (double v : rho.values()) sum += v - shift;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : rho.values()) ss += (v - shift - mean) * (v - shift - mean);
    return std::sqrt(ss / n);
}

ScalarField gaussian_blur(const ScalarField& rho, double sigma_domain) {
    detail::require(sigma_domain >= 0.0 && std::isfinite(sigma_domain),
                    "gaussian_blur: sigma must be non-negative");
    if (sigma_domain == 0.0 || rho.empty()) return rho;
    const long nx = static_cast<long>(rho.nx());
    const long ny = static_cast<long>(rho.ny());
    const auto tx = gaussian_taps(sigma_domain / rho.dx());
    const auto ty = gaussian_taps(sigma_domain / rho.dy());
    const long rx = static_cast<long>(tx.size() / 2);
    const long ry = static_cast<long>(ty.size() / 2);
    ScalarField tmp(rho.nx(), rho.ny());
    for (long j = 0; j < ny; ++j)
        for (long i = 0; i < nx; ++i) {
            double s = 0.0;
            for (long d = -rx; d <= rx; ++d)
                s += tx[static_cast<std::size_t>(d + rx)] *
                     rho(static_cast<std::size_t>(reflect(i + d, nx)), static_cast<std::size_t>(j));
            tmp(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
        }
    ScalarField out(rho.nx(), rho.ny());
    for (long j = 0; j < ny; ++j)
        for (long i = 0; i < nx; ++i) {
            double s = 0.0;
            for (long d = -ry; d <= ry; ++d)
                s += ty[static_cast<std::size_t>(d + ry)] *
                     tmp(static_cast<std::size_t>(i), static_cast<std::size_t>(reflect(j + d, ny)));
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
        }
    return out;
}

ScalarField denoise(const ScalarField& rho, double sigma, const DenoiserSpec& spec) {
    detail::require(sigma >= 0.0 && std::isfinite(sigma), "denoise: sigma must be non-negative");
    if (sigma == 0.0) return rho;
    switch (spec.kind) {
    case DenoiserKind::identity: return rho;
    case DenoiserKind::gaussian_blur: return gaussian_blur(rho, spec.blur_factor * sigma);
    case DenoiserKind::external: return run_external(rho, sigma, spec);
    }
    throw InvalidArgument("denoise: unknown denoiser kind");
}

ScalarField hqs_deconvolve(const DeconvProblem& problem, HqsTrace* trace) {
    problem.validate();
    const auto op = build_convolution_operator(problem.params, problem.u.nx(), problem.u.ny());
    return hqs_deconvolve(problem, op, trace);
}

ScalarField hqs_deconvolve(const DeconvProblem& problem, const LinearConvolution& op,
                           HqsTrace* trace) {
    problem.validate();
    ScalarField rho2(problem.u.nx(), problem.u.ny());
    double nu = problem.nu0;
    for (int k = 0; k < problem.iters; ++k) {
        const auto step = tikhonov_step(problem.u, rho2, nu, op, problem.cg_tol, problem.cg_max_iter);
        const double sigma = estimate_sigma(step.rho);
        rho2 = denoise(step.rho, sigma, problem.denoiser);
        if (trace) {
            trace->nus.push_back(nu);
            trace->sigmas.push_back(sigma);
            trace->cg_iterations.push_back(step.iterations);
        }
        // A constant iterate carries no noise estimate; the coupling is kept.
        if (sigma > 0.0) nu = problem.mu / (sigma * sigma);
    }
    if (problem.clamp_nonneg)
        for (auto& v : rho2.values()) v = std::max(v, 0.0);
    return rho2;
}

ScalarField gradient_normal(const ScalarField& rho) {
    const std::size_t nx = rho.nx();
    const std::size_t ny = rho.ny();
    ScalarField out(nx, ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double d = rho(i + 1, j) - rho(i, j);
            out(i + 1, j) += d;
            out(i, j) -= d;
        }
    for (std::size_t j = 0; j + 1 < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double d = rho(i, j + 1) - rho(i, j);
            out(i, j + 1) += d;
            out(i, j) -= d;
        }
    return out;
}

ScalarField quadratic_deconvolve(const ScalarField& u, const KernelParams& params, double mu,
                                 double tol, int max_iter) {
    const auto op = build_convolution_operator(params, u.nx(), u.ny());
    return quadratic_deconvolve(u, op, mu, tol, max_iter);
}

ScalarField quadratic_deconvolve(const ScalarField& u, const LinearConvolution& op, double mu,
                                 double tol, int max_iter) {
    detail::require(std::isfinite(mu) && mu > 0.0, "quadratic_deconvolve: mu must be positive");
    detail::require(u.nx() == op.nx() && u.ny() == op.ny(), "quadratic_deconvolve: shape mismatch");
    const auto apply = [&](const ScalarField& x) {
        ScalarField y = op.adjoint(op.apply(x));
        const ScalarField g = gradient_normal(x);
        for (std::size_t k = 0; k < y.size(); ++k) y[k] += mu * g[k];
        return y;
    };
    return conjugate_gradients(apply, op.adjoint(u), ScalarField(u.nx(), u.ny()), tol, max_iter).rho;
}

ScalarField deconvolve(const DeconvProblem& problem, const LinearConvolution& op, HqsTrace* trace) {
    problem.validate();
    ScalarField rho = problem.mode == DeconvMode::hqs
                          ? hqs_deconvolve(problem, op, trace)
                          : quadratic_deconvolve(problem.u, op, problem.mu, problem.cg_tol,
                                                 problem.cg_max_iter);
    if (problem.clamp_nonneg)
        for (auto& v : rho.values()) v = std::max(v, 0.0);
    return rho;
}

}  // namespace mpirecon
