#include "emholo/recon_em.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "emholo/metrics.hpp"

namespace emholo {

void ReconParams::validate() const {
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
    if (tau && !(*tau >= 0.0)) throw ConfigError("tau must be non-negative");
    if (tv_epsilon && !(*tv_epsilon > 0.0)) throw ConfigError("tv_epsilon must be positive");
    if (ratio_floor && !(*ratio_floor > 0.0)) throw ConfigError("ratio_floor must be positive");
    if (!(init_floor_fraction > 0.0)) throw ConfigError("init_floor_fraction must be positive");
    if (stop_rule == StopRule::RelativeChange && !(stop_delta > 0.0)) {
        throw ConfigError("stop_delta must be positive");
    }
    if (divergence_patience < 1) throw ConfigError("divergence_patience must be at least 1");
    if (upper_bound) require_finite(*upper_bound, "upper bound");
}

void write_trace_csv(std::ostream& os, const ReconTrace& trace) {
    const auto old_precision = os.precision(17);
    os << "iteration,nll,tv,ssim,millis\n";
    for (const auto& r : trace.records) {
        os << r.iteration << ',' << r.nll << ',' << r.tv << ',';
        if (r.ssim) os << *r.ssim;
        os << ',' << r.millis << '\n';
    }
    os.precision(old_precision);
}

RealGrid2D predicted_intensity(const HologramOperator& op, const std::vector<RealGrid2D>& estimate) {
    return op.apply(estimate);
}

RealGrid2D predicted_intensity(const HologramOperator& op, const std::vector<ComplexGrid2D>& estimate) {
    return op.apply(estimate);
}

double nll(const RealGrid2D& g, const RealGrid2D& g_hat, double floor) {
    require_same_shape(g.geometry(), g_hat.geometry(), "nll");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double gh = std::max(g_hat[i], floor);
        acc += gh;
        if (g[i] != 0.0) acc -= g[i] * std::log(gh);
    }
    return acc;
}

namespace {

RealGrid2D clamped_ratio(const RealGrid2D& g, const RealGrid2D& g_hat, double floor) {
    require_same_shape(g.geometry(), g_hat.geometry(), "ratio");
    RealGrid2D ratio(g.geometry());
    for (std::size_t i = 0; i < g.size(); ++i) ratio[i] = g[i] / std::max(g_hat[i], floor);
    return ratio;
}

} // namespace

std::vector<ComplexGrid2D> nll_gradient_slices_complex(const RealGrid2D& b, const RealGrid2D& b_hat,
                                                       const HologramOperator& op, double floor) {
    auto grads = op.adjoint(clamped_ratio(b, b_hat, floor));
    for (std::size_t z = 0; z < grads.size(); ++z) {
        const auto& ones = op.ones_adjoint()[z];
        auto& grad = grads[z];
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = ones[i] - grad[i];
    }
    return grads;
}

std::vector<RealGrid2D> nll_gradient_slices(const RealGrid2D& g, const RealGrid2D& g_hat,
                                            const HologramOperator& op, double floor) {
    std::vector<RealGrid2D> out;
    for (const auto& c : nll_gradient_slices_complex(g, g_hat, op, floor)) out.push_back(real_part(c));
    return out;
}

RealGrid2D em_step(const RealGrid2D& w, const RealGrid2D& grad) {
    require_same_shape(w.geometry(), grad.geometry(), "em_step");
    RealGrid2D out(w.geometry());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] - std::fabs(w[i]) * grad[i];
    return out;
}

RealGrid2D alternating_update(const RealGrid2D& w, const RealGrid2D& nll_grad, const RealGrid2D& tv_grad,
                              double tau) {
    require_same_shape(w.geometry(), tv_grad.geometry(), "alternating_update");
    RealGrid2D out = em_step(w, nll_grad);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= std::fabs(out[i]) * tau * tv_grad[i];
    return out;
}

RealGrid2D apply_upper_bound(const RealGrid2D& w, const RealGrid2D& ub, double beta) {
    require_same_shape(w.geometry(), ub.geometry(), "apply_upper_bound");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
    RealGrid2D out = w;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] > ub[i]) out[i] = ub[i] + beta * (out[i] - ub[i]);
    }
    return out;
}

double default_tv_epsilon(const RealGrid2D& w, double tau, double step) {
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    double eps = 1e-4 * (*hi - *lo);
    eps = std::max(eps, 10.0 * tau * step);
    if (eps > 0.0) return eps;
    const double level = std::max(std::fabs(*hi), std::fabs(*lo));
    return level > 0.0 ? 1e-4 * level : 1e-12;
}

bool is_rise(double previous, double current) {
    return current - previous > 1e-6 * std::fabs(previous);
}

double stack_ssim(const std::vector<ComplexGrid2D>& reference, const ObjectStack& estimate,
                  const HologramOperator& op) {
    if (reference.size() != estimate.size()) throw ConfigError("reference and estimate slice counts differ");
    double acc = 0.0;
    for (std::size_t z = 0; z < reference.size(); ++z) {
        const ComplexGrid2D o = object_from_scaled(estimate[z], z, op);
        if (estimate.real_only()) {
            acc += ssim(real_part(reference[z]), real_part(o));
        } else {
            acc += 0.5 * (ssim(real_part(reference[z]), real_part(o)) + ssim(imag_part(reference[z]), imag_part(o)));
        }
    }
    return acc / static_cast<double>(reference.size());
}

namespace {

using Clock = std::chrono::steady_clock;

double slice_epsilon(const RealGrid2D& w, const ReconParams& params, double tau) {
    if (params.tv_epsilon) return *params.tv_epsilon;
    double peak = 0.0;
    for (double v : w) peak = std::max(peak, std::fabs(v));
    return default_tv_epsilon(w, tau, peak);
}

bool all_finite(const RealGrid2D& w) {
    return std::all_of(w.begin(), w.end(), [](double v) { return std::isfinite(v); });
}

// Alternating update with a non-finite safeguard: both gradients are halved, at most four
// times, until the update stays finite.
RealGrid2D safeguarded_update(const RealGrid2D& w, const RealGrid2D& nll_grad, const RealGrid2D& tv_grad,
                              double tau) {
    RealGrid2D out = alternating_update(w, nll_grad, tv_grad, tau);
    double scale = 1.0;
    for (int attempt = 0; attempt < 4 && !all_finite(out); ++attempt) {
        scale *= 0.5;
        RealGrid2D g1 = nll_grad;
        RealGrid2D g2 = tv_grad;
        for (auto& v : g1) v *= scale;
        for (auto& v : g2) v *= scale;
        out = alternating_update(w, g1, g2, tau);
    }
    if (!all_finite(out)) throw NumericError("update produced non-finite values after four step halvings");
    return out;
}

struct Setup {
    HologramOperator op;
    double mean_g;
    double floor;
    double tau;
};

Setup prepare(const RealGrid2D& hologram, const OpticalConfig& config, const ReconParams& params) {
    params.validate();
    Setup s{HologramOperator(config), 0.0, 0.0, 0.0};
    require_same_shape(config.geometry(), hologram.geometry(), "reconstruct");
    require_finite(hologram, "hologram");
    if (min_value(hologram) < 0.0) throw NumericError("hologram has negative intensities");
    s.mean_g = mean(hologram);
    const double scale = s.mean_g > 0.0 ? s.mean_g : 1.0;
    s.floor = params.ratio_floor.value_or(1e-12 * scale);
    s.tau = params.tau.value_or(0.002 * s.mean_g);
    if (params.upper_bound) require_same_shape(config.geometry(), params.upper_bound->geometry(), "upper bound");
    return s;
}

// Relative change sqrt(sum |w' - w|^2 / sum |w|^2) across all slices.
double relative_change(const std::vector<RealGrid2D>& before, const std::vector<RealGrid2D>& after) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t z = 0; z < before.size(); ++z) {
        for (std::size_t i = 0; i < before[z].size(); ++i) {
            const double d = after[z][i] - before[z][i];
            num += d * d;
            den += before[z][i] * before[z][i];
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double residual_norm(const RealGrid2D& g, const RealGrid2D& g_hat) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += (g[i] - g_hat[i]) * (g[i] - g_hat[i]);
    return std::sqrt(acc);
}

// Tracks consecutive NLL increases; true once the patience is exhausted.
class DivergenceDetector {
public:
    DivergenceDetector(double initial, int patience) : last_(initial), patience_(patience) {}
    bool update(double value) {
        rising_ = is_rise(last_, value) ? rising_ + 1 : 0;
        last_ = value;
        return rising_ >= patience_;
    }

private:
    double last_;
    int patience_;
    int rising_ = 0;
};

} // namespace

ReconResult reconstruct_real(const RealGrid2D& hologram, const OpticalConfig& config, const ReconParams& params,
                             const QualityReference* reference) {
    const Setup s = prepare(hologram, config, params);
    const auto slices = static_cast<std::ptrdiff_t>(s.op.slice_count());
    const double share = 1.0 / static_cast<double>(slices);

    std::vector<RealGrid2D> w;
    if (params.init_mode == InitMode::Backpropagation) {
        const double floor = params.init_floor_fraction * s.mean_g * share;
        for (const auto& c : backpropagate(hologram, s.op)) w.push_back(real_part(c));
        for (auto& slice : w) {
            for (auto& v : slice) v = std::max(v * share, floor);
        }
    } else {
        w.assign(slices, RealGrid2D(config.geometry(), s.mean_g * share));
    }

    std::optional<RealGrid2D> slice_bound;
    if (params.upper_bound) {
        slice_bound = *params.upper_bound;
        for (auto& v : *slice_bound) v *= share;
    }

    ReconResult result;
    result.resolved = {s.tau, s.floor, params.tv_epsilon};

    RealGrid2D g_hat = predicted_intensity(s.op, w);
    DivergenceDetector divergence(nll(hologram, g_hat, s.floor), params.divergence_patience);
    const auto start = Clock::now();

    for (int k = 1; k <= params.max_iters; ++k) {
        const auto grads = nll_gradient_slices(hologram, g_hat, s.op, s.floor);
        std::vector<RealGrid2D> next(w.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t z = 0; z < slices; ++z) {
            const RealGrid2D tv_grad = tv_gradient(w[z], slice_epsilon(w[z], params, s.tau));
            RealGrid2D updated = safeguarded_update(w[z], grads[z], tv_grad, s.tau);
            next[z] = slice_bound ? apply_upper_bound(updated, *slice_bound, params.beta) : std::move(updated);
        }
        const double change = relative_change(w, next);
        w = std::move(next);
        g_hat = predicted_intensity(s.op, w);

        TraceRecord rec;
        rec.iteration = k;
        rec.nll = nll(hologram, g_hat, s.floor);
        for (const auto& slice : w) rec.tv += tv_value(slice);
        rec.residual = residual_norm(hologram, g_hat);
        if (reference != nullptr) rec.ssim = stack_ssim(reference->slices, ObjectStack::from_real(w), s.op);
        if (params.record_timing) {
            rec.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }
        result.trace.records.push_back(rec);

        if (divergence.update(rec.nll)) {
            result.trace.halted = true;
            result.trace.diagnostic = "NLL increased for " + std::to_string(params.divergence_patience) +
                                      " consecutive iterations; halted at iteration " + std::to_string(k);
            break;
        }
        if (params.stop_rule == StopRule::RelativeChange && change < params.stop_delta) break;
    }
    result.estimate = ObjectStack::from_real(w);
    return result;
}

ReconResult reconstruct_complex(const RealGrid2D& hologram, const OpticalConfig& config,
                                const ReconParams& params, const QualityReference* reference) {
    const Setup s = prepare(hologram, config, params);
    const auto slices = static_cast<std::ptrdiff_t>(s.op.slice_count());
    const double share = 1.0 / static_cast<double>(slices);
    const double floor = params.init_floor_fraction * s.mean_g * share;

    std::vector<RealGrid2D> re;
    std::vector<RealGrid2D> im;
    if (params.init_mode == InitMode::Backpropagation) {
        for (const auto& c : backpropagate(hologram, s.op)) {
            RealGrid2D r = real_part(c);
            RealGrid2D i = imag_part(c);
            for (auto& v : r) v = std::max(v * share, floor);
            // The imaginary part may be signed but must not start inside the multiplicative trap.
            for (auto& v : i) {
                v *= share;
                if (std::fabs(v) < floor) v = floor;
            }
            re.push_back(std::move(r));
            im.push_back(std::move(i));
        }
    } else {
        re.assign(slices, RealGrid2D(config.geometry(), s.mean_g * share));
        im.assign(slices, RealGrid2D(config.geometry(), floor));
    }

    auto combine = [&] {
        std::vector<ComplexGrid2D> f;
        f.reserve(re.size());
        for (std::size_t z = 0; z < re.size(); ++z) f.push_back(to_complex(re[z], im[z]));
        return f;
    };

    ReconResult result;
    result.resolved = {s.tau, s.floor, params.tv_epsilon};

    RealGrid2D b_hat = predicted_intensity(s.op, combine());
    DivergenceDetector divergence(nll(hologram, b_hat, s.floor), params.divergence_patience);
    const auto start = Clock::now();

    for (int k = 1; k <= params.max_iters; ++k) {
        const auto grads = nll_gradient_slices_complex(hologram, b_hat, s.op, s.floor);
        std::vector<RealGrid2D> next_re(re.size());
        std::vector<RealGrid2D> next_im(im.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t z = 0; z < slices; ++z) {
            const RealGrid2D tv_re = tv_gradient(re[z], slice_epsilon(re[z], params, s.tau));
            const RealGrid2D tv_im = tv_gradient(im[z], slice_epsilon(im[z], params, s.tau));
            next_re[z] = safeguarded_update(re[z], real_part(grads[z]), tv_re, s.tau);
            next_im[z] = safeguarded_update(im[z], imag_part(grads[z]), tv_im, s.tau);
        }
        const double change = std::hypot(relative_change(re, next_re), relative_change(im, next_im));
        re = std::move(next_re);
        im = std::move(next_im);
        const auto f = combine();
        b_hat = predicted_intensity(s.op, f);

        TraceRecord rec;
        rec.iteration = k;
        rec.nll = nll(hologram, b_hat, s.floor);
        for (std::size_t z = 0; z < re.size(); ++z) rec.tv += tv_value(re[z]) + tv_value(im[z]);
        rec.residual = residual_norm(hologram, b_hat);
        if (reference != nullptr) rec.ssim = stack_ssim(reference->slices, ObjectStack(f, false), s.op);
        if (params.record_timing) {
            rec.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }
        result.trace.records.push_back(rec);

        if (divergence.update(rec.nll)) {
            result.trace.halted = true;
            result.trace.diagnostic = "NLL increased for " + std::to_string(params.divergence_patience) +
                                      " consecutive iterations; halted at iteration " + std::to_string(k);
            break;
        }
        if (params.stop_rule == StopRule::RelativeChange && change < params.stop_delta) break;
    }
    result.estimate = ObjectStack(combine(), false);
    return result;
}

} // namespace emholo
