#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mpirecon/config.hpp"
#include "mpirecon/core_stage.hpp"
#include "mpirecon/deconv_stage.hpp"
#include "mpirecon/forward.hpp"
#include "mpirecon/metrics.hpp"
#include "mpirecon/phantom.hpp"

namespace mpirecon {

/// The scan described by the config (optionally merged with its 90 degree rotation).
ScanGeometry make_scan_geometry(const PipelineConfig& config);

/// Phantoms selected by config.phantom.
std::vector<PhantomSpec> selected_phantoms(const PipelineConfig& config);

struct SimulationResult {
    PhantomSpec phantom;
    ScalarField rho_fine;     ///< ground truth on the fine grid
    ScalarField rho_recon;    ///< ground truth area-averaged onto the reconstruction grid
    ScalarField ideal_trace;  ///< kappa_h * rho on the reconstruction grid
    ScanSeries series;
};

/// Rasterize, convolve, sample along the scan and add noise.
SimulationResult simulate(const PipelineConfig& config, const PhantomSpec& phantom,
                          std::uint64_t seed);

struct ReconstructionResult {
    CoreSolution core;
    ScalarField trace;
    ScalarField rho;
    HqsTrace hqs;
};

/// Core stage (CG or direct, per config) followed by deconvolution.
ReconstructionResult reconstruct(const PipelineConfig& config, const ScanSeries& series);

/// Core stage only.
CoreSolution run_core_stage(const PipelineConfig& config, const ScanSeries& series);

/// Deconvolution of a trace on the reconstruction grid.
ScalarField run_deconv_stage(const PipelineConfig& config, const ScalarField& trace,
                             const LinearConvolution& op, HqsTrace* trace_out = nullptr);

/// Two-step magnitude search: j in {1,5} x 10^i for i in [exp_min, exp_max],
/// then j in {1..9} x 10^i for i in {i*-1, i*, i*+1}.
struct GridSpec {
    bool refine = true;
    int exp_min = -3;
    int exp_max = 3;
    std::vector<int> coarse_mantissas{1, 5};
};

struct GridRow {
    std::string phase;  ///< "coarse" or "refined"
    double value = 0.0;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
};

struct GridSearchResult {
    std::vector<GridRow> rows;
    double best_value = 0.0;
    double best_psnr = 0.0;
};

/// Coarse grid values j * 10^i.
std::vector<double> coarse_grid(const GridSpec& spec);
/// Refined values around magnitude i*.
std::vector<double> refined_grid(int best_exponent);

/// Generic search: evaluate(value) returns the dataset-mean scores.
GridSearchResult grid_search(const GridSpec& spec,
                             const std::function<ScorePair(double)>& evaluate);

/// Lambda search scored by core-stage trace PSNR against the ideal trace,
/// averaged over the simulations (all on one scan geometry).
GridSearchResult search_lambda(const PipelineConfig& config,
                               const std::vector<SimulationResult>& sims, const GridSpec& spec);

/// Mu search at fixed traces, scored by reconstruction PSNR against rho_recon.
GridSearchResult search_mu(const PipelineConfig& config, const std::vector<SimulationResult>& sims,
                           const std::vector<ScalarField>& traces, const GridSpec& spec);

/// Core-stage traces for all simulations at the config's lambda and order.
std::vector<ScalarField> core_traces(const PipelineConfig& config,
                                     const std::vector<SimulationResult>& sims);

}  // namespace mpirecon
