#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "mpirecon/grid.hpp"
#include "mpirecon/kernels.hpp"

namespace mpirecon {

struct ScorePair {
    double psnr = 0.0;  ///< dB; +infinity for identical images
    double ssim = 0.0;
};

/// kappa_h * rho_gt on the fine grid, area-averaged onto the nx-by-ny grid.
ScalarField ideal_trace(const ScalarField& rho_gt, const KernelParams& params, std::size_t nx,
                        std::size_t ny);

/// Dynamic range max - min of the reference image.
double default_peak(const ScalarField& reference);

/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const ScalarField& x, const ScalarField& y, double peak);

/// Mean SSIM over all 11x11 Gaussian windows (sigma 1.5) fully inside the
/// image, with C1 = (0.01 peak)^2 and C2 = (0.03 peak)^2.
double ssim(const ScalarField& x, const ScalarField& y, double peak);

/// Scores `estimate` against `reference` with peak = default_peak(reference).
ScorePair score(const ScalarField& estimate, const ScalarField& reference);

/// Anisotropic discrete total variation sum |dx| + |dy| of forward differences.
double total_variation(const ScalarField& field);

/// Writes `phantom,stage,order,psnr,ssim` rows; header via write_score_header.
void write_score_header(std::ostream& out);
void write_score_row(std::ostream& out, const std::string& phantom, const std::string& stage,
                     int order, const ScorePair& scores);

}  // namespace mpirecon
