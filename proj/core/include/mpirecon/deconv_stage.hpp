#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "mpirecon/convolution.hpp"
#include "mpirecon/grid.hpp"
#include "mpirecon/kernels.hpp"

namespace mpirecon {

enum class DenoiserKind { gaussian_blur, identity, external };

struct DenoiserSpec {
    DenoiserKind kind = DenoiserKind::gaussian_blur;
    /// Gaussian standard deviation in domain units is blur_factor * sigma.
    double blur_factor = 0.1;
    /// Executable invoked with the exchange directory as its only argument.
    std::string command;
    /// Exchange directory; a fresh temporary directory is used when empty.
    std::string exchange_dir;
    std::chrono::milliseconds timeout{60000};
};

enum class DeconvMode { hqs, quadratic };

struct DeconvProblem {
    ScalarField u;
    KernelParams params;
    double mu = 0.01;
    double nu0 = 1.0;
    int iters = 8;
    DenoiserSpec denoiser;
    DeconvMode mode = DeconvMode::hqs;
    bool clamp_nonneg = false;
    double cg_tol = 1e-8;
    int cg_max_iter = 2000;

    void validate() const;
};

/// The discretized trace-kernel convolution C_h on a reconstruction grid:
/// kappa_h sampled at grid offsets times the cell area, zero padded.
LinearConvolution build_convolution_operator(const KernelParams& params, std::size_t nx,
                                             std::size_t ny);

struct TikhonovResult {
    ScalarField rho;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// argmin ||u - C rho||^2 + nu ||rho - rho2||^2 by CG on
/// (C^T C + nu I) rho = C^T u + nu rho2, started at rho2.
TikhonovResult tikhonov_step(const ScalarField& u, const ScalarField& rho2, double nu,
                             const LinearConvolution& op, double tol = 1e-8, int max_iter = 2000);

/// Square root of the population variance over all cells.
double estimate_sigma(const ScalarField& rho);

/// Separable Gaussian blur with reflective boundaries; sigma in domain units.
ScalarField gaussian_blur(const ScalarField& rho, double sigma_domain);

ScalarField denoise(const ScalarField& rho, double sigma, const DenoiserSpec& spec);

struct HqsTrace {
    std::vector<double> sigmas;  ///< sigma_{k+1} per iteration
    std::vector<double> nus;     ///< nu_k per iteration
    std::vector<int> cg_iterations;
};

/// Half-quadratic splitting: alternating Tikhonov steps and denoising, with
/// nu_k = mu / sigma_k^2 and sigma_{k+1} estimated from each Tikhonov iterate.
ScalarField hqs_deconvolve(const DeconvProblem& problem, HqsTrace* trace = nullptr);
ScalarField hqs_deconvolve(const DeconvProblem& problem, const LinearConvolution& op,
                           HqsTrace* trace = nullptr);

/// Baseline: argmin mu ||grad rho||^2 + ||C rho - u||^2 with forward
/// differences (no flux across the boundary), solved by CG.
ScalarField quadratic_deconvolve(const ScalarField& u, const KernelParams& params, double mu,
                                 double tol = 1e-8, int max_iter = 4000);
ScalarField quadratic_deconvolve(const ScalarField& u, const LinearConvolution& op, double mu,
                                 double tol = 1e-8, int max_iter = 4000);

/// Dispatches on problem.mode and applies the optional final clamp.
ScalarField deconvolve(const DeconvProblem& problem, const LinearConvolution& op,
                       HqsTrace* trace = nullptr);

/// Forward-difference gradient operator and its adjoint (Neumann: no difference
/// across the outer boundary). Exposed for tests.
ScalarField gradient_normal(const ScalarField& rho);

}  // namespace mpirecon
