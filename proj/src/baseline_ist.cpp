#include "emholo/baseline_ist.hpp"

#include <algorithm>
#include <chrono>

namespace emholo {

void BaselineParams::validate() const {
    if (step_size && !(*step_size > 0.0)) throw ConfigError("step_size must be positive");
    if (tau && !(*tau >= 0.0)) throw ConfigError("tau must be non-negative");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (tv_epsilon && !(*tv_epsilon > 0.0)) throw ConfigError("tv_epsilon must be positive");
    if (power_iterations < 1) throw ConfigError("power_iterations must be at least 1");
    if (divergence_patience < 1) throw ConfigError("divergence_patience must be at least 1");
}

double estimate_lipschitz(const HologramOperator& op, int iterations) {
    const Geometry geometry = op.config().geometry();
    const auto slices = op.slice_count();
    // Deterministic, non-constant start so that no eigenvector is missed by symmetry.
    std::vector<RealGrid2D> v(slices, RealGrid2D(geometry));
    for (std::size_t z = 0; z < slices; ++z) {
        for (std::size_t i = 0; i < v[z].size(); ++i) {
            v[z][i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 1.3 * static_cast<double>(z));
        }
    }
    auto norm = [](const std::vector<RealGrid2D>& x) {
        double acc = 0.0;
        for (const auto& s : x) acc += dot(s, s);
        return std::sqrt(acc);
    };
    double lambda = 0.0;
    double n = norm(v);
    for (int it = 0; it < iterations; ++it) {
        for (auto& s : v) {
            for (auto& x : s) x /= n;
        }
        v = op.adjoint_real(op.apply(v));
        n = norm(v);
        lambda = n;
        if (!(n > 0.0)) break;
    }
    return lambda;
}

std::vector<RealGrid2D> least_squares_gradient(const RealGrid2D& g, const std::vector<RealGrid2D>& f,
                                               const HologramOperator& op) {
    RealGrid2D residual = op.apply(f);
    require_same_shape(residual.geometry(), g.geometry(), "least_squares_gradient");
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= g[i];
    return op.adjoint_real(residual);
}

ReconResult baseline_reconstruct(const RealGrid2D& hologram, const OpticalConfig& config,
                                 const BaselineParams& params, const QualityReference* reference,
                                 double* used_step) {
    params.validate();
    const HologramOperator op(config);
    require_same_shape(config.geometry(), hologram.geometry(), "baseline_reconstruct");
    require_finite(hologram, "hologram");
    const double mean_g = mean(hologram);
    const double tau = params.tau.value_or(0.002 * mean_g);
    const double floor = 1e-12 * (mean_g > 0.0 ? mean_g : 1.0);
    const double step = params.step_size ? *params.step_size : 1.0 / estimate_lipschitz(op, params.power_iterations);
    if (!std::isfinite(step)) throw NumericError("baseline step size is not finite");
    if (used_step != nullptr) *used_step = step;

    const auto slices = static_cast<std::ptrdiff_t>(op.slice_count());
    const double share = 1.0 / static_cast<double>(slices);
    std::vector<RealGrid2D> f;
    for (const auto& c : backpropagate(hologram, op)) f.push_back(real_part(c));
    for (auto& s : f) {
        for (auto& v : s) v *= share;
    }

    ReconResult result;
    result.resolved = {tau, floor, params.tv_epsilon};
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    RealGrid2D g_hat = op.apply(f);
    double last_data = 0.0;
    for (std::size_t i = 0; i < g_hat.size(); ++i) last_data += 0.5 * (hologram[i] - g_hat[i]) * (hologram[i] - g_hat[i]);
    int rising = 0;

    for (int k = 1; k <= params.max_iters; ++k) {
        RealGrid2D residual = g_hat;
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= hologram[i];
        const auto grads = op.adjoint_real(residual);

        std::vector<RealGrid2D> next(f.size());
        std::vector<double> tv_before(f.size());
        std::vector<double> tv_after(f.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t z = 0; z < slices; ++z) {
            const double eps = params.tv_epsilon ? *params.tv_epsilon : default_tv_epsilon(f[z], tau, step);
            const RealGrid2D tv_grad = tv_gradient(f[z], eps);
            RealGrid2D s = f[z];
            for (std::size_t i = 0; i < s.size(); ++i) s[i] -= step * (grads[z][i] + tau * tv_grad[i]);
            tv_before[z] = tv_value_smoothed(f[z], eps);
            tv_after[z] = tv_value_smoothed(s, eps);
            next[z] = std::move(s);
        }
        f = std::move(next);
        for (const auto& s : f) require_finite(s, "baseline estimate");
        g_hat = op.apply(f);

        TraceRecord rec;
        rec.iteration = k;
        rec.nll = nll(hologram, g_hat, floor);
        for (const auto& s : f) rec.tv += tv_value(s);
        double res = 0.0;
        for (std::size_t i = 0; i < g_hat.size(); ++i) res += (hologram[i] - g_hat[i]) * (hologram[i] - g_hat[i]);
        rec.residual = std::sqrt(res);
        if (reference != nullptr) rec.ssim = stack_ssim(reference->slices, ObjectStack::from_real(f), op);
        if (params.record_timing) {
            rec.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }
        result.trace.records.push_back(rec);

        // Both iterates are scored with the smoothing used for this step.
        double before = last_data;
        double after = 0.5 * res;
        for (std::size_t z = 0; z < f.size(); ++z) {
            before += tau * tv_before[z];
            after += tau * tv_after[z];
        }
        last_data = 0.5 * res;
        rising = is_rise(before, after) ? rising + 1 : 0;
        if (rising >= params.divergence_patience) {
            result.trace.halted = true;
            result.trace.diagnostic = "objective increased for " + std::to_string(params.divergence_patience) +
                                      " consecutive iterations; halted at iteration " + std::to_string(k);
            break;
        }
    }
    result.estimate = ObjectStack::from_real(f);
    return result;
}

} // namespace emholo
