#include <gtest/gtest.h>

#include <cmath>

#include "mpirecon/core_stage.hpp"
#include "mpirecon/error.hpp"
#include "mpirecon/phantom.hpp"
#include "mpirecon/rng.hpp"

using namespace mpirecon;

namespace {

CoeffTensor random_coeffs(std::size_t n, std::size_t m, std::uint64_t seed) {
    SeededGenerator gen(seed);
    CoeffTensor c(n, m);
    for (auto& a : c.data()) {
        a.a11 = gen.uniform_open() - 0.5;
        a.a12 = gen.uniform_open() - 0.5;
        a.a21 = gen.uniform_open() - 0.5;
        a.a22 = gen.uniform_open() - 0.5;
    }
    return c;
}

CoreProblem small_problem(int order, double lambda = 1e-2) {
    CoreProblem p;
    p.scan.geometry = make_lissajous_scan(LissajousSpec{}, 400);
    const auto rho = rasterize(builtin_phantom("disk"), 64, 64);
    p.scan.signals = add_noise(simulate_signal(core_response_field(rho, KernelParams{0.02}),
                                               p.scan.geometry),
                               0.02, 7);
    p.n = 8;
    p.m = 8;
    p.order = order;
    p.lambda = lambda;
    p.ridge = 0.0;
    p.tol = 1e-12;
    p.max_iter = 5000;
    return p;
}

double& entry_ref(Mat2& a, int e) {
    switch (e) {
        case 0: return a.a11;
        case 1: return a.a12;
        case 2: return a.a21;
        default: return a.a22;
    }
}

double relative_difference(const CoeffTensor& a, const CoeffTensor& b) {
    auto d = a;
    d -= b;
    return std::sqrt(d.frobenius_sq() / b.frobenius_sq());
}

}  // namespace

TEST(CoreOperator, MatchesNaiveEvaluation) {
    const auto geom = make_lissajous_scan(LissajousSpec{}, 120);
    const CoreOperator op(geom, 5, 6);
    const auto c = random_coeffs(5, 6, 1);
    const auto p = op.predict(c);
    for (std::size_t l = 0; l < geom.size(); ++l) {
        Vec2 expected{0.0, 0.0};
        for (std::size_t k = 0; k < 5; ++k)
            for (std::size_t j = 0; j < 6; ++j) {
                const double u = cos_eval({int(k), int(j)}, geom.positions[l][0], geom.positions[l][1]);
                const auto v = c(k, j).apply(geom.velocities[l]);
                expected[0] += u * v[0];
                expected[1] += u * v[1];
            }
        EXPECT_NEAR(p[l][0], expected[0], 1e-12);
        EXPECT_NEAR(p[l][1], expected[1], 1e-12);
    }
    const auto free_fn = predict(c, geom);
    EXPECT_EQ(free_fn, p);
}

TEST(CoreOperator, AdjointIdentityAndDiagonal) {
    const auto geom = make_lissajous_scan(LissajousSpec{}, 150);
    const CoreOperator op(geom, 4, 4);
    const auto c = random_coeffs(4, 4, 2);
    SeededGenerator gen(3);
    std::vector<Vec2> e(geom.size());
    for (auto& v : e) v = {gen.uniform_open() - 0.5, gen.uniform_open() - 0.5};
    const auto p = op.predict(c);
    double lhs = 0.0;
    for (std::size_t l = 0; l < e.size(); ++l) lhs += p[l][0] * e[l][0] + p[l][1] * e[l][1];
    EXPECT_NEAR(lhs, inner(c, op.adjoint(e)), 1e-10);

    const auto diag = op.normal_diagonal();
    CoeffTensor unit(4, 4);
    unit(2, 1).a21 = 1.0;
    const auto column = op.adjoint(op.predict(unit));
    EXPECT_NEAR(diag(2, 1).a21, column(2, 1).a21, 1e-12 * column(2, 1).a21);
}

TEST(CoreStage, RegularizerWeights) {
    const auto w1 = regularizer_weights(3, 3, 1);
    const auto w2 = regularizer_weights(3, 3, 2);
    EXPECT_EQ(w1[0], 0.0);
    EXPECT_NEAR(w1[1 * 3 + 2], laplace_eigenvalue({1, 2}), 1e-14);
    EXPECT_NEAR(w2[2 * 3 + 2], bilaplace_eigenvalue({2, 2}), 1e-12);
    EXPECT_THROW(regularizer_weights(3, 3, 3), InvalidArgument);
}

TEST(CoreStage, HessianIsSymmetricPositiveSemidefinite) {
    for (int order : {1, 2}) {
        const auto problem = small_problem(order);
        const CoreOperator op(problem.scan.geometry, problem.n, problem.m);
        for (std::uint64_t s = 0; s < 4; ++s) {
            const auto x = random_coeffs(8, 8, 10 + s);
            const auto y = random_coeffs(8, 8, 20 + s);
            const double xhy = inner(x, apply_core_hessian(op, y, problem));
            const double hxy = inner(apply_core_hessian(op, x, problem), y);
            EXPECT_NEAR(xhy, hxy, 1e-10 * (std::abs(xhy) + 1.0));
            EXPECT_GE(inner(x, apply_core_hessian(op, x, problem)), 0.0);
        }
    }
}

TEST(CoreStage, GradientMatchesFiniteDifferences) {
    const auto problem = small_problem(2);
    const auto c = random_coeffs(8, 8, 4);
    const auto g = gradient(c, problem);
    const double step = 1e-6;
    for (std::size_t idx : {0u, 5u, 17u, 63u}) {
        for (int entry = 0; entry < 4; ++entry) {
            auto plus = c, minus = c;
            entry_ref(plus[idx], entry) += step;
            entry_ref(minus[idx], entry) -= step;
            const double fd = (energy(plus, problem) - energy(minus, problem)) / (2.0 * step);
            auto g_entry = g[idx];
            const double analytic = entry_ref(g_entry, entry);
            EXPECT_NEAR(analytic, fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(CoreStage, ZeroSignalGivesZeroSolution) {
    auto problem = small_problem(1);
    for (auto& s : problem.scan.signals) s = {0.0, 0.0};
    const auto sol = solve_core(problem);
    EXPECT_EQ(sol.coeffs.frobenius_sq(), 0.0);
    EXPECT_TRUE(sol.converged);
}

TEST(CoreStage, NonPositiveLambdaRejected) {
    auto problem = small_problem(1);
    problem.lambda = 0.0;
    EXPECT_THROW(solve_core(problem), InvalidArgument);
    problem.lambda = -1.0;
    EXPECT_THROW(solve_core(problem), InvalidArgument);
}

TEST(CoreStage, ConjugateGradientsDecreaseEnergy) {
    for (int order : {1, 2}) {
        const auto problem = small_problem(order);
        const auto sol = solve_core(problem);
        EXPECT_TRUE(sol.converged);
        ASSERT_GE(sol.log.size(), 2u);
        for (std::size_t i = 1; i < sol.log.size(); ++i)
            EXPECT_LE(sol.log[i].energy, sol.log[i - 1].energy + 1e-12 * std::abs(sol.log[i - 1].energy));
        EXPECT_NEAR(sol.energy, energy(sol.coeffs, problem), 1e-9 * std::abs(sol.energy));
        // Stationarity.
        const auto g = gradient(sol.coeffs, problem);
        const auto b = CoreOperator(problem.scan.geometry, 8, 8).adjoint(problem.scan.signals);
        EXPECT_LT(std::sqrt(g.frobenius_sq()), 1e-9 * std::sqrt(b.frobenius_sq()) * 10.0);
    }
}

TEST(CoreStage, DirectSolverAgreesWithConjugateGradients) {
    for (int order : {1, 2}) {
        for (double lambda : {1e-3, 1e-1}) {
            auto problem = small_problem(order, lambda);
            problem.ridge = 1e-12;
            const auto cg = solve_core(problem);
            const CoreDirectSolver direct(problem.scan.geometry, 8, 8, order, 1e-12);
            const auto exact = direct.solve(problem.scan.signals, lambda);
            EXPECT_LT(relative_difference(cg.coeffs, exact), 1e-6) << "order " << order << " lambda " << lambda;
        }
    }
}

TEST(CoreStage, DirectSolverBatchMatchesSingle) {
    const auto problem = small_problem(2);
    const CoreDirectSolver direct(problem.scan.geometry, 8, 8, 2);
    auto other = problem.scan.signals;
    for (auto& s : other) s = {2.0 * s[1], -s[0]};
    const auto batch = direct.solve({problem.scan.signals, other}, 0.01);
    ASSERT_EQ(batch.size(), 2u);
    EXPECT_LT(relative_difference(batch[1], direct.solve(other, 0.01)), 1e-12);
    EXPECT_THROW(direct.solve(problem.scan.signals, 0.0), InvalidArgument);
}

TEST(CoreStage, LargeLambdaLeavesOnlyConstantMode) {
    const auto problem = small_problem(2, 1e8);
    const CoreDirectSolver direct(problem.scan.geometry, 8, 8, 2);
    const auto c = direct.solve(problem.scan.signals, 1e8);
    double rest = 0.0;
    for (std::size_t i = 1; i < c.modes(); ++i) rest += c[i].frobenius_sq();
    EXPECT_LT(std::sqrt(rest), 1e-5 * std::sqrt(c[0].frobenius_sq()));
}

TEST(CoreStage, TraceFieldMatchesSynthesis) {
    const auto c = random_coeffs(6, 6, 9);
    const auto u = trace_field(c, 20, 20);
    const auto f = synthesize(c, 20, 20).trace();
    for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(u[k], f[k], 1e-12);
}
