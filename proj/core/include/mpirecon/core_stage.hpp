#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "mpirecon/forward.hpp"
#include "mpirecon/spectral.hpp"

namespace mpirecon {

/// Quadratic core-stage problem: estimate the cosine coefficients of the core
/// response from the signal series.
///
///   E(A) = lambda/(2|Omega|) sum_m w_m ||A_m||_F^2 + 1/(2L) sum_l |s_l - p_l|^2
///
/// with w_m = mu_m (order 1) or mu_m^2 (order 2) and p_l = sum_m u_m(r_l) A_m v_l.
struct CoreProblem {
    ScanSeries scan;
    std::size_t n = 64;
    std::size_t m = 64;
    int order = 2;
    double lambda = 0.01;
    double ridge = 1e-12;
    double tol = 1e-8;
    int max_iter = 2000;
    bool jacobi_preconditioner = true;

    void validate() const;
};

struct CgLogEntry {
    int iteration = 0;
    double residual = 0.0;
    double energy = 0.0;
};

struct CoreSolution {
    CoeffTensor coeffs;
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    double energy = 0.0;
    bool converged = false;
    std::vector<CgLogEntry> log;
};

/// Matrix-free sampling operator B: coefficients -> predicted signals, and its
/// adjoint. Basis values u_m(r_l) are cached as two 1D cosine tables.
class CoreOperator {
public:
    CoreOperator(const ScanGeometry& geom, std::size_t n, std::size_t m);
    ~CoreOperator();
    CoreOperator(CoreOperator&&) noexcept;
    CoreOperator& operator=(CoreOperator&&) noexcept;

    std::size_t n() const;
    std::size_t m() const;
    std::size_t samples() const;

    /// p_l = sum_m u_m(r_l) A_m v_l.
    std::vector<Vec2> predict(const CoeffTensor& coeffs) const;

    /// G_m = sum_l u_m(r_l) e_l v_l^T.
    CoeffTensor adjoint(const std::vector<Vec2>& residuals) const;

    /// Diagonal of B^T B, per mode and matrix entry.
    CoeffTensor normal_diagonal() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Regularizer weights w_m for an n-by-m truncation, row-major.
std::vector<double> regularizer_weights(std::size_t n, std::size_t m, int order);

std::vector<Vec2> predict(const CoeffTensor& coeffs, const ScanGeometry& geom);

double energy(const CoeffTensor& coeffs, const CoreProblem& problem);

/// Gradient of the energy plus the ridge term ridge * A.
CoeffTensor gradient(const CoeffTensor& coeffs, const CoreProblem& problem);

/// Applies the Hessian H A = (lambda/|Omega|) w A + (1/L) B^T B A + ridge A.
CoeffTensor apply_core_hessian(const CoreOperator& op, const CoeffTensor& coeffs,
                               const CoreProblem& problem);

/// Conjugate gradients on H A = (1/L) B^T s from a zero start. When the
/// iteration cap is hit the best iterate is returned with converged = false.
/// Throws InvalidArgument for lambda <= 0.
CoreSolution solve_core(const CoreProblem& problem);
CoreSolution solve_core(const CoreProblem& problem, const CoreOperator& op);

/// u(x_i, y_j) = sum_m trace(A_m) u_m(x_i, y_j).
ScalarField trace_field(const CoeffTensor& coeffs, std::size_t nx, std::size_t ny);

/// Exact minimizer of the same energy through the L-by-L dual system.
///
/// The non-constant modes are eliminated with the Woodbury identity; the two
/// unpenalized constant-mode entries per matrix row are recovered from a 2x2
/// Schur complement. The data Gram matrix depends on lambda only through a
/// scalar factor, so it is built once and reused across lambda values, signal
/// sets and matrix rows. The ridge is applied to the constant mode only.
class CoreDirectSolver {
public:
    CoreDirectSolver(const ScanGeometry& geom, std::size_t n, std::size_t m, int order,
                     double ridge = 1e-12);
    ~CoreDirectSolver();
    CoreDirectSolver(CoreDirectSolver&&) noexcept;
    CoreDirectSolver& operator=(CoreDirectSolver&&) noexcept;

    /// Solutions for several signal series (all on the geometry) at one lambda.
    std::vector<CoeffTensor> solve(const std::vector<std::vector<Vec2>>& signal_sets,
                                   double lambda) const;
    CoeffTensor solve(const std::vector<Vec2>& signals, double lambda) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mpirecon
