#include <gtest/gtest.h>

#include <sstream>

#include "mpirecon/spectral.hpp"
#include "mpirecon/theory_checks.hpp"

using namespace mpirecon;

TEST(TheoryChecks, NeumannEigenpairs) {
    for (const ModeIndex m : {ModeIndex{0, 0}, ModeIndex{1, 0}, ModeIndex{3, 2}, ModeIndex{6, 6}}) {
        const auto r = check_neumann_laplace_eigen(m, 100);
        EXPECT_TRUE(r.passed) << r.name << " " << r.max_residual();
    }
}

TEST(TheoryChecks, PerturbedEigenvalueFails) {
    const ModeIndex m{2, 1};
    const auto r = check_neumann_laplace_eigen(m, 100, 1e-8, laplace_eigenvalue(m) * (1.0 + 1e-3));
    EXPECT_FALSE(r.passed);
    EXPECT_GT(r.max_residual(), 1e-8);
}

TEST(TheoryChecks, BiLaplaceAndBoundaryTerms) {
    for (const ModeIndex m : {ModeIndex{0, 1}, ModeIndex{2, 2}, ModeIndex{5, 3}}) {
        EXPECT_TRUE(check_bilap_neumann_eigen(m, 100).passed);
        EXPECT_TRUE(check_r3_boundary_term(m).passed);
        EXPECT_TRUE(check_derivative_consistency(m).passed);
    }
}

TEST(TheoryChecks, DirichletVariants) {
    EXPECT_TRUE(check_dirichlet_variants({1, 1}).passed);
    EXPECT_TRUE(check_dirichlet_variants({4, 2}).passed);
}

TEST(TheoryChecks, NaturalBoundaryKernelIsInfinite) {
    const auto r = check_harmonic_kernel(6);
    EXPECT_TRUE(r.passed) << r.max_residual();
    EXPECT_TRUE(check_kernel_separable_family({0.0, 0.5, 1.7, 3.14159, 4.0}).passed);
}

TEST(TheoryChecks, LaplacianAndHessianRegularizersAgree) {
    const auto r = check_r2_equals_r3(10, 6);
    EXPECT_TRUE(r.passed) << r.max_residual();
}

TEST(TheoryChecks, SuiteAndReports) {
    TheorySuiteOptions options;
    options.max_mode = 2;
    options.r2r3_trials = 3;
    const auto reports = run_theory_suite(options);
    ASSERT_FALSE(reports.empty());
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name;
    std::ostringstream csv;
    write_reports_csv(reports, csv);
    EXPECT_EQ(csv.str().rfind("name,passed,max_residual,tolerance,note\n", 0), 0u);
    std::ostringstream table;
    print_reports_table(reports, table);
    EXPECT_NE(table.str().find(std::to_string(reports.size()) + " of " +
                               std::to_string(reports.size()) + " checks passed"),
              std::string::npos);
}
