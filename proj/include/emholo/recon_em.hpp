#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emholo/forward_model.hpp"

namespace emholo {

enum class InitMode { Backpropagation, Constant };
enum class StopRule { FixedIters, RelativeChange };

/// Settings for the multiplicative EM reconstruction. Unset optionals take
/// data-dependent defaults, resolved at the start of a run and reported back
/// in ReconResult::resolved.
struct ReconParams {
    int max_iters = 100;
    /// TV weight; default 0.002 * mean(g).
    std::optional<double> tau;
    /// Softness of the upper-bound clip, in [0, 1].
    double beta = 0.5;
    /// TV smoothing; default default_tv_epsilon(w, tau, max|w|) per slice and iteration.
    std::optional<double> tv_epsilon;
    /// Lower clamp for the predicted intensity; default 1e-12 * mean(g).
    std::optional<double> ratio_floor;
    InitMode init_mode = InitMode::Backpropagation;
    /// Backpropagation init is floored at this fraction of the slice's DC share of mean(g).
    double init_floor_fraction = 1e-3;
    StopRule stop_rule = StopRule::FixedIters;
    double stop_delta = 1e-6;
    /// Per-pixel ceiling on the hologram scale (reference illumination); each
    /// slice is bounded by UB times its DC share. Ignored in complex mode.
    std::optional<RealGrid2D> upper_bound;
    /// Halt when the NLL rises (see is_rise) this many iterations in a row.
    int divergence_patience = 5;
    /// Record wall time per iteration. Left off, traces are byte-identical across runs.
    bool record_timing = false;

    void validate() const;
};

/// Values the run actually used after defaults were resolved.
struct ResolvedParams {
    double tau = 0.0;
    double ratio_floor = 0.0;
    std::optional<double> tv_epsilon;
};

struct TraceRecord {
    int iteration = 0;
    double nll = 0.0;
    double tv = 0.0;
    std::optional<double> ssim;
    double residual = 0.0; // ||g - g_hat||_2
    double millis = 0.0;
};

struct ReconTrace {
    std::vector<TraceRecord> records;
    bool halted = false;
    std::string diagnostic;
};

/// CSV with header "iteration,nll,tv,ssim,millis"; an absent SSIM is an empty field.
void write_trace_csv(std::ostream& os, const ReconTrace& trace);

struct ReconResult {
    /// Scaled-object estimates f_z (DC folded in). Real-only for reconstruct_real.
    ObjectStack estimate;
    ReconTrace trace;
    ResolvedParams resolved;
};

/// Ground-truth object slices o_z (not scaled) for the per-iteration SSIM column.
struct QualityReference {
    std::vector<ComplexGrid2D> slices;
};

// ---- building blocks ----

RealGrid2D predicted_intensity(const HologramOperator& op, const std::vector<RealGrid2D>& estimate);
RealGrid2D predicted_intensity(const HologramOperator& op, const std::vector<ComplexGrid2D>& estimate);

/// Poisson negative log-likelihood sum(g_hat - g log g_hat), g_hat clamped to `floor` first.
double nll(const RealGrid2D& g, const RealGrid2D& g_hat, double floor = 0.0);

/// Per-slice gradient l_re - h_re(-x, z) (*) g/g_hat, realized as
/// Re[H^* 1 - T_z^* (g / max(g_hat, floor))].
std::vector<RealGrid2D> nll_gradient_slices(const RealGrid2D& g, const RealGrid2D& g_hat,
                                            const HologramOperator& op, double floor);

/// Complex-object gradient: real part is grad J_re,z, imaginary part is
/// grad J_im,z = -l_im + h_im(-x, z) (*) b/b_hat.
std::vector<ComplexGrid2D> nll_gradient_slices_complex(const RealGrid2D& b, const RealGrid2D& b_hat,
                                                       const HologramOperator& op, double floor);

/// Isotropic TV, forward differences with replicate boundary (last difference 0).
double tv_value(const RealGrid2D& w);

/// Smoothed TV sum sqrt(|grad w|^2 + eps^2); tv_gradient is its exact gradient.
double tv_value_smoothed(const RealGrid2D& w, double eps);

/// -Div(grad w / sqrt(|grad w|^2 + eps^2)), forward-difference gradient and
/// backward-difference divergence, replicate boundary. tau is applied by the caller.
RealGrid2D tv_gradient(const RealGrid2D& w, double eps);

/// Default TV smoothing for one slice: max(1e-4 (max w - min w), 10 tau step),
/// where `step` is the largest per-pixel step size applied to tau * tv_gradient
/// (max |w| for the multiplicative update). The second term keeps the explicit
/// TV step below its stability limit 2 eps / (8 tau step).
double default_tv_epsilon(const RealGrid2D& w, double tau, double step);

/// True when `current` exceeds `previous` by more than 1e-6 relative. Used by
/// the divergence detectors so plateau round-off does not count as a rise.
bool is_rise(double previous, double current);

/// w - |w| grad, elementwise.
RealGrid2D em_step(const RealGrid2D& w, const RealGrid2D& grad);

/// w_mle = w - |w| nll_grad; w' = w_mle - |w_mle| tau tv_grad.
/// Both gradients must be evaluated at w.
RealGrid2D alternating_update(const RealGrid2D& w, const RealGrid2D& nll_grad, const RealGrid2D& tv_grad,
                              double tau);

/// Where w > ub: w' = ub + beta (w - ub). Other pixels untouched.
RealGrid2D apply_upper_bound(const RealGrid2D& w, const RealGrid2D& ub, double beta);

// ---- full reconstructions ----

ReconResult reconstruct_real(const RealGrid2D& hologram, const OpticalConfig& config, const ReconParams& params,
                             const QualityReference* reference = nullptr);

ReconResult reconstruct_complex(const RealGrid2D& hologram, const OpticalConfig& config,
                                const ReconParams& params, const QualityReference* reference = nullptr);

/// Mean SSIM over slices between reference objects o_z and the objects
/// recovered from scaled estimates f_z (real and imaginary parts averaged in
/// complex mode).
double stack_ssim(const std::vector<ComplexGrid2D>& reference, const ObjectStack& estimate,
                  const HologramOperator& op);

} // namespace emholo
