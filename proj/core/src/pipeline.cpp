#include "mpirecon/pipeline.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

DeconvProblem deconv_problem(const PipelineConfig& config, const ScalarField& trace) {
    DeconvProblem p;
    p.u = trace;
    p.params = config.kernel;
    p.mu = config.mu;
    p.nu0 = config.nu0;
    p.iters = config.deconv_iters;
    p.denoiser = config.denoiser;
    p.mode = config.deconv_mode;
    p.clamp_nonneg = config.clamp_nonneg;
    return p;
}

double decimal(int mantissa, int exponent) {
    return std::stod(std::to_string(mantissa) + "e" + std::to_string(exponent));
}

ScorePair mean_scores(const std::vector<ScorePair>& s) {
    ScorePair m;
    for (const auto& x : s) {
        m.psnr += x.psnr;
        m.ssim += x.ssim;
    }
    m.psnr /= static_cast<double>(s.size());
    m.ssim /= static_cast<double>(s.size());
    return m;
}

}  // namespace

ScanGeometry make_scan_geometry(const PipelineConfig& config) {
    auto geom = make_lissajous_scan(config.lissajous, config.samples);
    if (config.merge_rotated) geom = merge_scans(geom, rotate_scan(geom, 1));
    return geom;
}

std::vector<PhantomSpec> selected_phantoms(const PipelineConfig& config) {
    if (config.phantom == "suite") return builtin_phantoms();
    if (config.phantom.rfind("file:", 0) == 0) {
        PhantomSpec s;
        s.kind = PhantomKind::from_file;
        s.path = config.phantom.substr(5);
        s.name = "file";
        return {s};
    }
    return {builtin_phantom(config.phantom)};
}

SimulationResult simulate(const PipelineConfig& config, const PhantomSpec& phantom,
                          std::uint64_t seed) {
    config.validate();
    SimulationResult r;
    r.phantom = phantom;
    r.rho_fine = rasterize(phantom, config.fine_nx, config.fine_nx);
    const auto field = core_response_field(r.rho_fine, config.kernel);
    r.rho_recon = resample_area(r.rho_fine, config.recon_nx, config.recon_nx);
    r.ideal_trace = resample_area(field.trace(), config.recon_nx, config.recon_nx);
    r.series.geometry = make_scan_geometry(config);
    r.series.h = config.kernel.h;
    r.series.noise_fraction = config.noise_fraction;
    r.series.seed = seed;
    r.series.signals = add_noise(simulate_signal(field, r.series.geometry), config.noise_fraction, seed);
    return r;
}

CoreSolution run_core_stage(const PipelineConfig& config, const ScanSeries& series) {
    config.validate();
    CoreProblem problem;
    problem.scan = series;
    problem.n = config.coeff_n;
    problem.m = config.coeff_n;
    problem.order = config.order;
    problem.lambda = config.lambda;
    problem.ridge = config.ridge;
    problem.tol = config.core_tol;
    problem.max_iter = config.core_max_iter;
    problem.validate();
    if (config.core_solver == CoreSolverKind::cg) return solve_core(problem);

    CoreDirectSolver solver(series.geometry, problem.n, problem.m, problem.order, problem.ridge);
    CoreSolution sol;
    sol.coeffs = solver.solve(series.signals, problem.lambda);
    CoreOperator op(series.geometry, problem.n, problem.m);
    auto rhs = op.adjoint(series.signals);
    rhs *= 1.0 / static_cast<double>(series.size());
    auto residual = apply_core_hessian(op, sol.coeffs, problem);
    residual -= rhs;
    sol.initial_residual = std::sqrt(rhs.frobenius_sq());
    sol.final_residual = std::sqrt(residual.frobenius_sq());
    sol.energy = energy(sol.coeffs, problem);
    sol.converged = sol.final_residual <= problem.tol * std::max(sol.initial_residual, 1e-300) ||
                    sol.initial_residual == 0.0;
    sol.log.push_back({0, sol.final_residual, sol.energy});
    return sol;
}

ScalarField run_deconv_stage(const PipelineConfig& config, const ScalarField& trace,
                             const LinearConvolution& op, HqsTrace* trace_out) {
    return deconvolve(deconv_problem(config, trace), op, trace_out);
}

ReconstructionResult reconstruct(const PipelineConfig& config, const ScanSeries& series) {
    ReconstructionResult r;
    r.core = run_core_stage(config, series);
    r.trace = trace_field(r.core.coeffs, config.recon_nx, config.recon_nx);
    const auto op = build_convolution_operator(config.kernel, config.recon_nx, config.recon_nx);
    r.rho = run_deconv_stage(config, r.trace, op, &r.hqs);
    return r;
}

std::vector<double> coarse_grid(const GridSpec& spec) {
    detail::require(spec.exp_min <= spec.exp_max && !spec.coarse_mantissas.empty(),
                    "coarse_grid: empty grid");
    std::vector<double> out;
    for (int i = spec.exp_min; i <= spec.exp_max; ++i)
        for (int j : spec.coarse_mantissas) out.push_back(decimal(j, i));
    return out;
}

std::vector<double> refined_grid(int best_exponent) {
    std::vector<double> out;
    for (int i = best_exponent - 1; i <= best_exponent + 1; ++i)
        for (int j = 1; j <= 9; ++j) out.push_back(decimal(j, i));
    return out;
}

GridSearchResult grid_search(const GridSpec& spec, const std::function<ScorePair(double)>& evaluate) {
    GridSearchResult result;
    result.best_psnr = -std::numeric_limits<double>::infinity();
    std::map<double, ScorePair> cache;
    const auto run = [&](const std::string& phase, double value) {
        auto it = cache.find(value);
        if (it == cache.end()) it = cache.emplace(value, evaluate(value)).first;
        result.rows.push_back({phase, value, it->second.psnr, it->second.ssim});
        if (it->second.psnr > result.best_psnr) {
            result.best_psnr = it->second.psnr;
            result.best_value = value;
        }
    };
    for (double v : coarse_grid(spec)) run("coarse", v);
    if (spec.refine) {
        const int exponent = static_cast<int>(std::floor(std::log10(result.best_value) + 1e-12));
        for (double v : refined_grid(exponent)) run("refined", v);
    }
    return result;
}

GridSearchResult search_lambda(const PipelineConfig& config, const std::vector<SimulationResult>& sims,
                               const GridSpec& spec) {
    config.validate();
    detail::require(!sims.empty(), "search_lambda: no simulations");
    const auto& geom = sims.front().series.geometry;
    std::vector<std::vector<Vec2>> signals;
    for (const auto& s : sims) {
        detail::require(s.series.size() == geom.size(), "search_lambda: simulations differ in geometry");
        signals.push_back(s.series.signals);
    }
    const CoreDirectSolver solver(geom, config.coeff_n, config.coeff_n, config.order, config.ridge);
    return grid_search(spec, [&](double lambda) {
        const auto coeffs = solver.solve(signals, lambda);
        std::vector<ScorePair> scores;
        for (std::size_t k = 0; k < sims.size(); ++k)
            scores.push_back(score(trace_field(coeffs[k], config.recon_nx, config.recon_nx),
                                   sims[k].ideal_trace));
        return mean_scores(scores);
    });
}

GridSearchResult search_mu(const PipelineConfig& config, const std::vector<SimulationResult>& sims,
                           const std::vector<ScalarField>& traces, const GridSpec& spec) {
    config.validate();
    detail::require(!sims.empty() && sims.size() == traces.size(), "search_mu: size mismatch");
    const auto op = build_convolution_operator(config.kernel, config.recon_nx, config.recon_nx);
    return grid_search(spec, [&](double mu) {
        PipelineConfig c = config;
        c.mu = mu;
        std::vector<ScorePair> scores;
        for (std::size_t k = 0; k < sims.size(); ++k)
            scores.push_back(score(run_deconv_stage(c, traces[k], op), sims[k].rho_recon));
        return mean_scores(scores);
    });
}

std::vector<ScalarField> core_traces(const PipelineConfig& config,
                                     const std::vector<SimulationResult>& sims) {
    std::vector<ScalarField> out;
    if (sims.empty()) return out;
    if (config.core_solver == CoreSolverKind::direct) {
        const CoreDirectSolver solver(sims.front().series.geometry, config.coeff_n, config.coeff_n,
                                      config.order, config.ridge);
        std::vector<std::vector<Vec2>> signals;
        for (const auto& s : sims) signals.push_back(s.series.signals);
        for (const auto& c : solver.solve(signals, config.lambda))
            out.push_back(trace_field(c, config.recon_nx, config.recon_nx));
        return out;
    }
    for (const auto& s : sims)
        out.push_back(trace_field(run_core_stage(config, s.series).coeffs, config.recon_nx, config.recon_nx));
    return out;
}

}  // namespace mpirecon
