#include "mpirecon/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "mpirecon/error.hpp"

namespace mpirecon::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_dir(const std::string& out_dir) {
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_effective_config(const PipelineConfig& config, const fs::path& dir) {
    auto out = open_out(dir / "config.txt");
    write_config(config, out);
}

}  // namespace

std::vector<SimulatedFiles> cmd_simulate(const PipelineConfig& config, const std::string& out_dir) {
    config.validate();
    const auto dir = prepare_dir(out_dir);
    write_effective_config(config, dir);
    std::vector<SimulatedFiles> files;
    for (const auto& phantom : selected_phantoms(config)) {
        const auto sim = simulate(config, phantom, config.seed);
        SimulatedFiles f;
        f.scan_csv = (dir / (phantom.name + "_scan.csv")).string();
        f.ground_truth_pgm = (dir / (phantom.name + "_gt.pgm")).string();
        f.ideal_trace_pgm = (dir / (phantom.name + "_ideal_trace.pgm")).string();
        save_series_csv(sim.series, f.scan_csv);
        save_field(sim.rho_recon, f.ground_truth_pgm);
        save_field(sim.ideal_trace, f.ideal_trace_pgm);
        files.push_back(f);
    }
    return files;
}

ReconstructionResult cmd_reconstruct(const PipelineConfig& config, const std::string& scan_path,
                                     const std::string& out_dir) {
    config.validate();
    const auto series = load_series_csv(scan_path);
    const auto dir = prepare_dir(out_dir);
    auto result = reconstruct(config, series);
    save_coeffs(result.core.coeffs, (dir / "coeffs.bin").string());
    save_field(result.trace, (dir / "trace.pgm").string());
    save_field(result.rho, (dir / "recon.pgm").string());
    {
        auto out = open_out(dir / "diagnostics.csv");
        out << "iter,residual,energy\n";
        for (const auto& e : result.core.log)
            out << e.iteration << ',' << fmt(e.residual) << ',' << fmt(e.energy) << '\n';
    }
    {
        auto out = open_out(dir / "hqs.csv");
        out << "iter,nu,sigma,cg_iterations\n";
        for (std::size_t k = 0; k < result.hqs.nus.size(); ++k)
            out << k << ',' << fmt(result.hqs.nus[k]) << ',' << fmt(result.hqs.sigmas[k]) << ','
                << result.hqs.cg_iterations[k] << '\n';
    }
    return result;
}

GridSearchResult cmd_gridsearch(const PipelineConfig& config, SearchParam param,
                                const GridSpec& spec, const std::string& out_dir) {
    config.validate();
    const auto dir = prepare_dir(out_dir);
    std::vector<SimulationResult> sims;
    for (const auto& phantom : selected_phantoms(config))
        sims.push_back(simulate(config, phantom, config.seed));
    GridSearchResult result;
    std::string name;
    if (param == SearchParam::lambda) {
        result = search_lambda(config, sims, spec);
        name = "lambda";
    } else {
        result = search_mu(config, sims, core_traces(config, sims), spec);
        name = "mu";
    }
    auto out = open_out(dir / ("gridsearch_" + name + ".csv"));
    out << "phase," << name << ",mean_psnr,mean_ssim\n";
    for (const auto& r : result.rows)
        out << r.phase << ',' << fmt(r.value) << ',' << fmt(r.mean_psnr) << ',' << fmt(r.mean_ssim) << '\n';
    return result;
}

bool cmd_verify(const TheorySuiteOptions& options, const std::string& csv_path, std::ostream& out,
                double eigenvalue_perturbation) {
    auto reports = run_theory_suite(options);
    if (eigenvalue_perturbation != 0.0) {
        const ModeIndex m{1, 1};
        reports.push_back(check_neumann_laplace_eigen(
            m, options.points, options.tolerance, laplace_eigenvalue(m) + eigenvalue_perturbation));
    }
    print_reports_table(reports, out);
    if (!csv_path.empty()) {
        const fs::path path(csv_path);
        if (path.has_parent_path()) prepare_dir(path.parent_path().string());
        auto csv = open_out(path);
        write_reports_csv(reports, csv);
    }
    for (const auto& r : reports)
        if (!r.passed) return false;
    return true;
}

ScorePair cmd_metrics(const std::string& estimate_path, const std::string& reference_path) {
    const auto estimate = load_field(estimate_path);
    const auto reference = load_field(reference_path);
    if (!estimate.same_shape(reference)) throw InvalidArgument("metrics: images differ in size");
    return score(estimate, reference);
}

}  // namespace mpirecon::cli
