#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mpirecon/pipeline.hpp"
#include "mpirecon/theory_checks.hpp"

namespace mpirecon::cli {

/// Files written by cmd_simulate for one phantom.
struct SimulatedFiles {
    std::string scan_csv;
    std::string ground_truth_pgm;
    std::string ideal_trace_pgm;
};

/// Simulates every selected phantom and writes `<name>_scan.csv`,
/// `<name>_gt.pgm` (reconstruction grid) and `<name>_ideal_trace.pgm`.
std::vector<SimulatedFiles> cmd_simulate(const PipelineConfig& config, const std::string& out_dir);

/// Reconstructs from a scan CSV and writes `coeffs.bin`, `trace.pgm`,
/// `recon.pgm`, `diagnostics.csv` (iter,residual,energy) and `hqs.csv`.
ReconstructionResult cmd_reconstruct(const PipelineConfig& config, const std::string& scan_path,
                                     const std::string& out_dir);

enum class SearchParam { lambda, mu };

/// Grid search over the selected phantoms; writes `gridsearch_<param>.csv`.
GridSearchResult cmd_gridsearch(const PipelineConfig& config, SearchParam param,
                                const GridSpec& spec, const std::string& out_dir);

/// Runs the theory suite, prints the table and optionally writes the CSV
/// report. Returns true when every check passed.
bool cmd_verify(const TheorySuiteOptions& options, const std::string& csv_path, std::ostream& out,
                double eigenvalue_perturbation = 0.0);

/// Scores two images with the peak taken from `reference`.
ScorePair cmd_metrics(const std::string& estimate_path, const std::string& reference_path);

}  // namespace mpirecon::cli
