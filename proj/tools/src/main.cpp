#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

#include "mpirecon/commands.hpp"
#include "mpirecon/error.hpp"

namespace {

using namespace mpirecon;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

// Preset, config file and per-key flags of one subcommand.
struct ConfigOptions {
    std::string preset;
    std::string config_path;
    std::string out_dir = ".";
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> flags;

    void attach(CLI::App* sub) {
        sub->add_option("--preset", preset, "Start from a named preset")
            ->check(CLI::IsMember(PipelineConfig::preset_names()));
        sub->add_option("--config", config_path, "key=value configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        for (const auto& key : PipelineConfig::keys()) {
            auto* opt = sub->add_option("--" + key, values[key], "Overrides " + key)->group("Configuration");
            flags.emplace_back(key, opt);
        }
    }

    PipelineConfig resolve() const {
        PipelineConfig c = preset.empty() ? PipelineConfig{} : PipelineConfig::preset(preset);
        if (!config_path.empty()) c = load_config(config_path, c);
        for (const auto& [key, opt] : flags)
            if (opt->count() > 0) c.set(key, values.at(key));
        c.validate();
        return c;
    }
};

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run(int argc, char** argv) {
    CLI::App app{"Two-stage MPI reconstruction: simulation, core stage, deconvolution"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Simulate scans of the selected phantoms");
    ConfigOptions sim_opts;
    sim_opts.attach(simulate);

    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct from a scan CSV");
    ConfigOptions rec_opts;
    rec_opts.attach(reconstruct);
    std::string scan_path;
    reconstruct->add_option("--scan", scan_path, "Scan CSV written by simulate")
        ->required()
        ->check(CLI::ExistingFile);

    auto* gridsearch = app.add_subcommand("gridsearch", "Two-step magnitude search for lambda or mu");
    ConfigOptions grid_opts;
    grid_opts.attach(gridsearch);
    std::string param = "lambda";
    GridSpec grid;
    bool no_refine = false;
    gridsearch->add_option("--param", param, "Parameter to search")
        ->check(CLI::IsMember({"lambda", "mu"}))
        ->capture_default_str();
    gridsearch->add_option("--exp-min", grid.exp_min, "Smallest coarse exponent")->capture_default_str();
    gridsearch->add_option("--exp-max", grid.exp_max, "Largest coarse exponent")->capture_default_str();
    gridsearch->add_flag("--no-refine", no_refine, "Skip the refined pass");

    auto* verify = app.add_subcommand("verify", "Run the numerical theory checks");
    std::string verify_csv;
    TheorySuiteOptions suite;
    double perturb = 0.0;
    verify->add_option("--out", verify_csv, "CSV report path");
    verify->add_option("--max-mode", suite.max_mode, "Largest mode index per axis")->capture_default_str();
    verify->add_option("--tolerance", suite.tolerance, "Residual tolerance")->capture_default_str();
    verify->add_option("--perturb-eigenvalue", perturb,
                       "Adds a Neumann check with a shifted eigenvalue (negative control)");

    auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM of an image against a reference");
    std::string estimate_path, reference_path;
    metrics->add_option("estimate", estimate_path, "Reconstructed PGM")->required()->check(CLI::ExistingFile);
    metrics->add_option("reference", reference_path, "Ground-truth PGM")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (simulate->parsed()) {
        const auto config = sim_opts.resolve();
        for (const auto& f : cli::cmd_simulate(config, sim_opts.out_dir)) std::cout << f.scan_csv << '\n';
        return 0;
    }
    if (reconstruct->parsed()) {
        const auto config = rec_opts.resolve();
        const auto r = cli::cmd_reconstruct(config, scan_path, rec_opts.out_dir);
        std::cout << "core: iterations " << r.core.iterations << ", relative residual "
                  << fmt(r.core.initial_residual > 0 ? r.core.final_residual / r.core.initial_residual : 0.0)
                  << (r.core.converged ? "" : " (not converged)") << '\n';
        if (!r.core.converged) std::cerr << "warning: core stage did not reach the tolerance\n";
        return 0;
    }
    if (gridsearch->parsed()) {
        auto config = grid_opts.resolve();
        grid.refine = !no_refine;
        const auto p = param == "lambda" ? cli::SearchParam::lambda : cli::SearchParam::mu;
        const auto r = cli::cmd_gridsearch(config, p, grid, grid_opts.out_dir);
        std::cout << "phase," << param << ",mean_psnr,mean_ssim\n";
        for (const auto& row : r.rows)
            std::cout << row.phase << ',' << fmt(row.value) << ',' << fmt(row.mean_psnr) << ','
                      << fmt(row.mean_ssim) << '\n';
        std::cout << "best " << param << ' ' << fmt(r.best_value) << " (mean PSNR " << fmt(r.best_psnr) << ")\n";
        return 0;
    }
    if (verify->parsed()) {
        return cli::cmd_verify(suite, verify_csv, std::cout, perturb) ? 0 : kExitNumerical;
    }
    if (metrics->parsed()) {
        const auto s = cli::cmd_metrics(estimate_path, reference_path);
        std::cout << "psnr,ssim\n" << fmt(s.psnr) << ',' << fmt(s.ssim) << '\n';
        return 0;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mpirecon::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mpirecon::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const mpirecon::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
