#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emholo/forward_model.hpp"
#include "emholo/grid.hpp"

namespace emholo {

double mse(const RealGrid2D& a, const RealGrid2D& b);

/// 10 log10(peak^2 / mse); +infinity when the images are identical.
double psnr(const RealGrid2D& a, const RealGrid2D& b, double peak);
double psnr_from_mse(double mse_value, double peak);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// averaged over windows that lie fully inside the image. Images narrower than
/// 11 pixels use the largest odd window that fits.
///
/// The dynamic range defaults to the larger of the two images' peak absolute
/// values, which keeps ssim(a, b) == ssim(b, a).
double ssim(const RealGrid2D& a, const RealGrid2D& b, std::optional<double> data_range = std::nullopt);

/// k x k median with replicate boundary; k odd and >= 3.
RealGrid2D median_filter(const RealGrid2D& a, std::size_t k = 3);

/// k x k mean with replicate boundary.
RealGrid2D mean_filter(const RealGrid2D& a, std::size_t k);

struct QualityReport {
    double mse = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double ssim_after_median = 0.0;
};

/// All four image-quality figures of `estimate` against `reference`.
QualityReport quality_report(const RealGrid2D& estimate, const RealGrid2D& reference, double peak,
                             std::size_t median_size = 3);

/// {"mse": ..., "psnr_db": ..., "ssim": ..., "ssim_after_median": ...}; an
/// infinite PSNR is written as the string "inf".
std::string to_json(const QualityReport& report);
QualityReport quality_report_from_json(const std::string& text);

/// Variance of the forward-difference gradient magnitude.
double focus_metric(const RealGrid2D& a);

struct AutofocusResult {
    double z = 0.0;
    double score = 0.0;
    /// The maximum sits on the first or last candidate.
    bool low_confidence = false;
    std::vector<double> candidates;
    std::vector<double> scores;
};

/// Backpropagates the hologram to every z on the grid z_min + i z_step (<= z_max)
/// and returns the z whose amplitude maximizes focus_metric. Ties go to the
/// smallest z. Only the geometry, wavelength and padding of `config` are used.
AutofocusResult autofocus(const RealGrid2D& hologram, const OpticalConfig& config, double z_min, double z_max,
                          double z_step);

struct ResolutionLimits {
    double lateral = 0.0; // lambda / (2 NA)
    double axial = 0.0;   // 2 lambda / NA^2
};

ResolutionLimits resolution_limits(double wavelength, double numerical_aperture);

} // namespace emholo
