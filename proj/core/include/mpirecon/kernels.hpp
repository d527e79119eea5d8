#pragma once

#include "mpirecon/grid.hpp"

namespace mpirecon {

/// Parameters of the Langevin convolution kernels.
struct KernelParams {
    double h = 0.01;                ///< dimensionless resolution parameter, > 0
    int n = 2;                      ///< spatial dimension, 2 or 3
    double series_threshold = 0.5;  ///< z = |y|/h below which the Taylor series is used

    void validate() const;
};

/// Langevin function coth(z) - 1/z. Odd, with Lambda(0) = 0.
double langevin(double z, double series_threshold = 0.5);

/// Derivative of the Langevin function, 1/z^2 - 1/sinh(z)^2.
double langevin_derivative(double z, double series_threshold = 0.5);

/// f1(z) = Lambda(z) / z, analytic with f1(0) = 1/3.
double f1(double z, double series_threshold = 0.5);

/// f2(z) = Lambda'(z) - f1(z), analytic with f2(0) = 0.
double f2(double z, double series_threshold = 0.5);

/// Trace profile f(z) = n f1(z) + f2(z).
double trace_profile(double z, int n, double series_threshold = 0.5);

/// Matrix kernel K_h(y) = grad_y( Lambda(|y|/h) y/|y| ) for n = 2.
SymMat2 kernel_matrix(const Vec2& y, const KernelParams& params);

/// Trace kernel kappa_h(y) = f(|y|/h) / h. Radial and strictly positive.
double kernel_trace(const Vec2& y, const KernelParams& params);

/// Same as kernel_trace but for an arbitrary radius, usable with n = 3.
double kernel_trace_radial(double r, const KernelParams& params);

}  // namespace mpirecon
