#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpirecon/spectral.hpp"

namespace mpirecon {

/// Named residuals of one numerical identity check.
struct CheckReport {
    std::string name;
    std::vector<std::pair<std::string, double>> residuals;
    double tolerance = 1e-8;
    bool passed = false;
    std::string note;

    double max_residual() const;
    void finalize();
};

/// -Lap u_m = mu_m u_m in the interior and d_nu u_m = 0 on the boundary.
/// `eigenvalue_override` replaces mu_m (negative control).
CheckReport check_neumann_laplace_eigen(const ModeIndex& m, int num_points,
                                        double tolerance = 1e-8,
                                        std::optional<double> eigenvalue_override = {},
                                        std::uint64_t seed = 7);

/// Lap^2 u_m = mu_m^2 u_m with d_nu u_m = 0 and d_nu Lap u_m = 0 on all edges.
CheckReport check_bilap_neumann_eigen(const ModeIndex& m, int num_points,
                                      double tolerance = 1e-8, std::uint64_t seed = 11);

/// Sine modes: Dirichlet Laplacian and simply supported plate conditions.
CheckReport check_dirichlet_variants(const ModeIndex& m, double tolerance = 1e-8,
                                     std::uint64_t seed = 13);

/// cos(pi n (x+1)/2) cosh(pi n (y+1)/2), n = 0..n_max: harmonic and mutually
/// orthogonal, hence in the kernel of the all-natural Bi-Laplacian problem.
CheckReport check_harmonic_kernel(int n_max, double tolerance = 1e-8, std::size_t quad = 512,
                                  std::uint64_t seed = 17);

/// The four products of the mu = 0 separable family for each omega are harmonic.
CheckReport check_kernel_separable_family(const std::vector<double>& omega_values,
                                          double tolerance = 1e-8, std::uint64_t seed = 19);

/// Laplacian and Hessian regularizers agree on random Neumann cosine expansions
/// and both equal the diagonal spectral form.
CheckReport check_r2_equals_r3(int num_trials, int band, double tolerance = 1e-8,
                               std::uint64_t seed = 23);

/// The Hessian-regularizer natural boundary expression vanishes on all edges.
CheckReport check_r3_boundary_term(const ModeIndex& m, double tolerance = 1e-8);

/// Closed-form derivatives of u_m agree with 5-point finite differences.
CheckReport check_derivative_consistency(const ModeIndex& m, double tolerance = 1e-6,
                                         std::uint64_t seed = 29);

struct TheorySuiteOptions {
    int max_mode = 6;
    int harmonic_n_max = 6;
    int r2r3_trials = 20;
    int r2r3_band = 8;
    int points = 100;
    double tolerance = 1e-8;
};

std::vector<CheckReport> run_theory_suite(const TheorySuiteOptions& options = {});

/// One line per check: `name,passed,max_residual,tolerance,note`.
void write_reports_csv(const std::vector<CheckReport>& reports, std::ostream& out);
void print_reports_table(const std::vector<CheckReport>& reports, std::ostream& out);

}  // namespace mpirecon
