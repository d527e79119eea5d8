#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mpirecon/deconv_stage.hpp"
#include "mpirecon/kernels.hpp"
#include "mpirecon/trajectory.hpp"

namespace mpirecon {

enum class CoreSolverKind { cg, direct };

/// All pipeline hyperparameters. Defaults give the sparse 16:17 scan with
/// second-order regularization.
struct PipelineConfig {
    KernelParams kernel{};

    LissajousSpec lissajous{};
    std::size_t samples = 1632;
    bool merge_rotated = false;

    std::size_t fine_nx = 512;
    std::size_t recon_nx = 100;
    std::size_t coeff_n = 64;

    int order = 2;
    double lambda = 0.01;
    double core_tol = 1e-8;
    int core_max_iter = 2000;
    double ridge = 1e-12;
    CoreSolverKind core_solver = CoreSolverKind::cg;

    DeconvMode deconv_mode = DeconvMode::hqs;
    double mu = 0.01;
    double nu0 = 1.0;
    int deconv_iters = 8;
    DenoiserSpec denoiser{};
    bool clamp_nonneg = false;

    double noise_fraction = 0.02;
    std::uint64_t seed = 1;

    /// Built-in phantom name, `suite` for all built-ins, or `file:<path>`.
    std::string phantom = "k_stroke";

    void validate() const;

    /// Sets one `section.key` entry from its textual value.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    static std::vector<std::string> keys();
    static std::vector<std::string> preset_names();
    static PipelineConfig preset(const std::string& name);
};

/// Parses `section.key=value` lines; `#` starts a comment.
void apply_config_text(PipelineConfig& config, std::istream& in);
PipelineConfig load_config(const std::string& path, PipelineConfig base = {});
void write_config(const PipelineConfig& config, std::ostream& out);

}  // namespace mpirecon
