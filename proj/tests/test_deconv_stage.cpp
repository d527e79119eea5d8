#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "mpirecon/deconv_stage.hpp"
#include "mpirecon/error.hpp"
#include "mpirecon/metrics.hpp"
#include "mpirecon/phantom.hpp"
#include "test_support.hpp"

using namespace mpirecon;

namespace {

const KernelParams kParams{0.02};

Eigen::MatrixXd dense_operator(const LinearConvolution& op, std::size_t nx, std::size_t ny) {
    const auto n = static_cast<Eigen::Index>(nx * ny);
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        ScalarField e(nx, ny);
        e[static_cast<std::size_t>(col)] = 1.0;
        const auto out = op.apply(e);
        for (Eigen::Index row = 0; row < n; ++row) c(row, col) = out[static_cast<std::size_t>(row)];
    }
    return c;
}

std::string write_script(const std::string& dir, const std::string& body) {
    const auto path = dir + "/denoiser.sh";
    {
        std::ofstream out(path);
        out << "#!/bin/sh\n" << body << "\n";
    }
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path;
}

}  // namespace

TEST(Tikhonov, MatchesDenseNormalEquations) {
    const std::size_t n = 8;
    const auto op = build_convolution_operator(kParams, n, n);
    const auto u = test::random_field(n, n, 1);
    const auto rho2 = test::random_field(n, n, 2);
    const double nu = 0.05;
    const auto c = dense_operator(op, n, n);
    const Eigen::Map<const Eigen::VectorXd> uv(u.values().data(), 64);
    const Eigen::Map<const Eigen::VectorXd> r2(rho2.values().data(), 64);
    const Eigen::MatrixXd a = c.transpose() * c + nu * Eigen::MatrixXd::Identity(64, 64);
    const Eigen::VectorXd expected = a.ldlt().solve(c.transpose() * uv + nu * r2);
    const auto result = tikhonov_step(u, rho2, nu, op, 1e-13, 5000);
    EXPECT_TRUE(result.converged);
    for (std::size_t k = 0; k < 64; ++k)
        EXPECT_NEAR(result.rho[k], expected(static_cast<Eigen::Index>(k)), 1e-8 * expected.cwiseAbs().maxCoeff());
}

TEST(Tikhonov, ConsistentDataReturnsPrior) {
    const auto op = build_convolution_operator(kParams, 16, 16);
    const auto rho2 = rasterize(builtin_phantom("bar"), 16, 16);
    const auto u = op.apply(rho2);
    const auto result = tikhonov_step(u, rho2, 0.3, op);
    for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(result.rho[k], rho2[k], 1e-12);
    EXPECT_EQ(result.iterations, 0);
}

TEST(Tikhonov, LargeCouplingApproachesPrior) {
    const auto op = build_convolution_operator(kParams, 16, 16);
    const auto u = test::random_field(16, 16, 3);
    const auto rho2 = test::random_field(16, 16, 4);
    const auto result = tikhonov_step(u, rho2, 1e9, op);
    EXPECT_LT(norm(result.rho - rho2), 1e-6 * norm(rho2));
    EXPECT_THROW(tikhonov_step(u, rho2, 0.0, op), InvalidArgument);
}

TEST(Tikhonov, SmallCouplingAmplifiesNoise) {
    const std::size_t n = 32;
    const auto op = build_convolution_operator(kParams, n, n);
    const auto noise = test::random_field(n, n, 5);
    const ScalarField zero(n, n);
    double previous = 0.0;
    for (double nu : {1e-1, 1e-3, 1e-5}) {
        const double gain = norm(tikhonov_step(noise, zero, nu, op, 1e-10, 20000).rho) / norm(noise);
        EXPECT_GT(gain, previous) << nu;
        previous = gain;
    }
    EXPECT_GT(previous, 10.0);
}

TEST(EstimateSigma, Examples) {
    EXPECT_EQ(estimate_sigma(ScalarField(8, 8, 0.4)), 0.0);
    ScalarField pm(8, 8);
    for (std::size_t k = 0; k < pm.size(); ++k) pm[k] = k % 2 ? 1.0 : -1.0;
    EXPECT_DOUBLE_EQ(estimate_sigma(pm), 1.0);
}

TEST(GaussianBlur, PreservesConstantsAndReducesVariation) {
    const auto c = gaussian_blur(ScalarField(20, 20, 2.5), 0.2);
    for (double v : c.values()) EXPECT_NEAR(v, 2.5, 1e-12);
    const auto f = test::random_field(40, 40, 6);
    const auto g = gaussian_blur(f, 0.05);
    EXPECT_LT(total_variation(g), total_variation(f));
    EXPECT_NEAR(g.sum(), f.sum(), 1e-9 * f.size());
    const auto same = gaussian_blur(f, 0.0);
    EXPECT_EQ(same.values(), f.values());
}

TEST(Denoise, IdentityAndBlurKinds) {
    const auto f = test::random_field(16, 16, 7);
    DenoiserSpec id;
    id.kind = DenoiserKind::identity;
    EXPECT_EQ(denoise(f, 0.3, id).values(), f.values());
    DenoiserSpec blur;
    blur.blur_factor = 0.5;
    const auto a = denoise(f, 0.3, blur);
    const auto b = gaussian_blur(f, 0.15);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_DOUBLE_EQ(a[k], b[k]);
}

TEST(Hqs, OneIdentityIterationEqualsTikhonovStep) {
    const auto op = build_convolution_operator(kParams, 16, 16);
    DeconvProblem p;
    p.u = op.apply(rasterize(builtin_phantom("annulus"), 16, 16));
    p.params = kParams;
    p.iters = 1;
    p.nu0 = 0.2;
    p.denoiser.kind = DenoiserKind::identity;
    HqsTrace trace;
    const auto out = hqs_deconvolve(p, op, &trace);
    const auto step = tikhonov_step(p.u, ScalarField(16, 16), 0.2, op, p.cg_tol, p.cg_max_iter);
    for (std::size_t k = 0; k < out.size(); ++k) EXPECT_DOUBLE_EQ(out[k], step.rho[k]);
    ASSERT_EQ(trace.nus.size(), 1u);
    EXPECT_EQ(trace.nus[0], 0.2);
    EXPECT_DOUBLE_EQ(trace.sigmas[0], estimate_sigma(step.rho));
}

TEST(Hqs, ZeroDataGivesZeroAndKeepsCoupling) {
    const auto op = build_convolution_operator(kParams, 12, 12);
    DeconvProblem p;
    p.u = ScalarField(12, 12);
    p.params = kParams;
    p.iters = 3;
    HqsTrace trace;
    const auto out = hqs_deconvolve(p, op, &trace);
    EXPECT_EQ(out.max(), 0.0);
    EXPECT_EQ(out.min(), 0.0);
    for (double nu : trace.nus) EXPECT_EQ(nu, p.nu0);
}

TEST(Hqs, CouplingFollowsNoiseEstimate) {
    const auto op = build_convolution_operator(kParams, 24, 24);
    DeconvProblem p;
    p.u = op.apply(rasterize(builtin_phantom("disk"), 24, 24));
    p.params = kParams;
    p.iters = 4;
    p.mu = 0.01;
    HqsTrace trace;
    hqs_deconvolve(p, op, &trace);
    ASSERT_EQ(trace.nus.size(), 4u);
    for (std::size_t k = 1; k < 4; ++k)
        EXPECT_DOUBLE_EQ(trace.nus[k], p.mu / (trace.sigmas[k - 1] * trace.sigmas[k - 1]));
}

TEST(Hqs, ClampRemovesNegatives) {
    const auto op = build_convolution_operator(kParams, 16, 16);
    DeconvProblem p;
    p.u = test::random_field(16, 16, 8);
    p.params = kParams;
    p.iters = 2;
    p.clamp_nonneg = true;
    EXPECT_GE(deconvolve(p, op).min(), 0.0);
    p.clamp_nonneg = false;
    EXPECT_LT(deconvolve(p, op).min(), 0.0);
}

TEST(Hqs, InvalidProblemsRejected) {
    DeconvProblem p;
    p.u = ScalarField(16, 16);
    p.mu = -1.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p.mu = 0.01;
    p.iters = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    EXPECT_THROW(build_convolution_operator(kParams, 4, 4), InvalidArgument);
}

TEST(QuadraticBaseline, GradientNormalIsGraphLaplacian) {
    EXPECT_EQ(gradient_normal(ScalarField(6, 5, 3.0)).values(), ScalarField(6, 5).values());
    const auto x = test::random_field(7, 6, 9);
    const auto y = test::random_field(7, 6, 10);
    EXPECT_NEAR(dot(gradient_normal(x), y), dot(x, gradient_normal(y)), 1e-12);
    EXPECT_GE(dot(gradient_normal(x), x), 0.0);
}

TEST(QuadraticBaseline, StationarityAndLargeMu) {
    const std::size_t n = 16;
    const auto op = build_convolution_operator(kParams, n, n);
    const auto u = op.apply(rasterize(builtin_phantom("k_stroke"), n, n));
    const double mu = 1e-3;
    const auto rho = quadratic_deconvolve(u, op, mu, 1e-12, 20000);
    auto residual = op.adjoint(op.apply(rho) - u);
    residual += mu * gradient_normal(rho);
    EXPECT_LT(norm(residual), 1e-9 * norm(op.adjoint(u)));
    const auto smooth = quadratic_deconvolve(u, op, 1e6);
    EXPECT_LT(total_variation(smooth), 1e-3 * total_variation(rho));
}

TEST(ExternalDenoiser, CopyScriptRoundTrips) {
    const auto dir = test::temp_dir("external_ok");
    DenoiserSpec spec;
    spec.kind = DenoiserKind::external;
    spec.command = write_script(dir, "cp \"$1/in.pgm\" \"$1/out.pgm\" && cp \"$1/in.range\" \"$1/out.range\"");
    spec.exchange_dir = dir + "/exchange";
    const auto f = test::random_field(10, 12, 11);
    const auto g = denoise(f, 0.1, spec);
    const double step = (f.max() - f.min()) / 65535.0;
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(g[k], f[k], step);
    EXPECT_TRUE(std::filesystem::exists(dir + "/exchange/sigma"));
}

TEST(ExternalDenoiser, FailureAndTimeoutRaise) {
    const auto dir = test::temp_dir("external_bad");
    DenoiserSpec spec;
    spec.kind = DenoiserKind::external;
    spec.command = write_script(dir, "echo broken >&2\nexit 3");
    const auto f = test::random_field(8, 8, 12);
    EXPECT_THROW(denoise(f, 0.1, spec), IoError);

    spec.command = write_script(dir, "sleep 5");
    spec.timeout = std::chrono::milliseconds(200);
    const auto start = std::chrono::steady_clock::now();
    EXPECT_THROW(denoise(f, 0.1, spec), IoError);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));

    spec.command = write_script(dir, "exit 0");
    EXPECT_THROW(denoise(f, 0.1, spec), IoError);
    spec.command.clear();
    EXPECT_THROW(denoise(f, 0.1, spec), InvalidArgument);
}
