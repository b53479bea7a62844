#pragma once

#include <optional>

#include "emholo/recon_em.hpp"

namespace emholo {

/// Settings for the shrinkage-thresholding comparator.
///
/// This is a plain proximal-gradient style loop (least-squares data term plus
/// the same smoothed-TV step as the EM reconstruction). It is NOT TwIST: there
/// is no two-step relaxation and no momentum.
struct BaselineParams {
    /// Default 1 / L, L estimated by power iteration on H^* H.
    std::optional<double> step_size;
    /// TV weight; default 0.002 * mean(g), matching ReconParams.
    std::optional<double> tau;
    int max_iters = 100;
    std::optional<double> tv_epsilon;
    int power_iterations = 20;
    int divergence_patience = 5;
    bool record_timing = false;

    void validate() const;
};

/// Largest eigenvalue of H_re^* H_re by power iteration from a fixed start vector.
double estimate_lipschitz(const HologramOperator& op, int iterations = 20);

/// Gradient of 0.5 ||g - H f||^2 with respect to each slice: Re[T_z^* (H f - g)].
std::vector<RealGrid2D> least_squares_gradient(const RealGrid2D& g, const std::vector<RealGrid2D>& f,
                                               const HologramOperator& op);

/// f_half = f - step H^*(H f - g); f' = f_half - step tau tv_gradient(f).
/// Starts from the backpropagated hologram split across slices. Trace rows use
/// the same schema as the EM reconstruction; `resolved.tau` carries the TV weight
/// and the NLL column is the Poisson NLL of the current estimate.
ReconResult baseline_reconstruct(const RealGrid2D& hologram, const OpticalConfig& config,
                                 const BaselineParams& params, const QualityReference* reference = nullptr,
                                 double* used_step = nullptr);

} // namespace emholo
