#include "emholo/forward_model.hpp"

#include <string>

#include "emholo/log.hpp"
#include "emholo/random.hpp"

namespace emholo {

void OpticalConfig::validate() const {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw ConfigError("wavelength must be positive");
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw ConfigError("pixel pitch must be positive");
    geometry().validate();
    if (!(illumination_amplitude > 0.0) || !std::isfinite(illumination_amplitude)) {
        throw ConfigError("illumination amplitude must be positive");
    }
    if (slice_distances.empty()) throw ConfigError("at least one slice distance is required");
    for (std::size_t i = 0; i < slice_distances.size(); ++i) {
        const double z = slice_distances[i];
        if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError("slice distances must be positive");
        if (i > 0 && !(z > slice_distances[i - 1])) {
            throw ConfigError("slice distances must be strictly increasing");
        }
    }
}

ObjectStack::ObjectStack(std::vector<ComplexGrid2D> slices, bool real_only)
    : slices_(std::move(slices)), real_only_(real_only) {
    if (slices_.empty()) throw ConfigError("object stack needs at least one slice");
    for (const auto& s : slices_) {
        require_same_shape(slices_.front().geometry(), s.geometry(), "ObjectStack");
        require_finite(s, "ObjectStack");
        if (real_only_) {
            for (const auto& v : s) {
                if (v.imag() != 0.0) throw ConfigError("real-only object stack has a non-zero imaginary part");
            }
        }
    }
}

ObjectStack ObjectStack::from_real(const std::vector<RealGrid2D>& slices) {
    std::vector<ComplexGrid2D> c;
    c.reserve(slices.size());
    for (const auto& s : slices) c.push_back(to_complex(s));
    return ObjectStack(std::move(c), true);
}

std::vector<RealGrid2D> ObjectStack::real_parts() const {
    std::vector<RealGrid2D> out;
    for (const auto& s : slices_) out.push_back(real_part(s));
    return out;
}

std::vector<RealGrid2D> ObjectStack::imag_parts() const {
    std::vector<RealGrid2D> out;
    for (const auto& s : slices_) out.push_back(imag_part(s));
    return out;
}

HologramOperator::HologramOperator(const OpticalConfig& config) : config_(config) {
    config_.validate();
    const Geometry geometry = config_.geometry();
    const auto count = config_.slice_count();
    slices_.reserve(count);
    for (double z : config_.slice_distances) {
        slices_.emplace_back(geometry, config_.wavelength, z, config_.padding, config_.reference_phased);
    }
    ones_adjoint_.reserve(count);
    dc_shares_.reserve(count);
    for (const auto& slice : slices_) {
        const KernelSums l = slice.effective_kernel_sums();
        const complex_t c(l.re, l.im);
        dc_shares_.push_back(1.0 / (static_cast<double>(count) * c));
        if (config_.padding == Padding::None) {
            ones_adjoint_.emplace_back(geometry, std::conj(c));
        } else {
            ones_adjoint_.push_back(slice.adjoint(ComplexGrid2D(geometry, complex_t(1.0, 0.0))));
        }
    }
}

RealGrid2D HologramOperator::apply(const std::vector<ComplexGrid2D>& slices) const {
    if (slices.size() != slices_.size()) {
        throw ConfigError("expected " + std::to_string(slices_.size()) + " slices, got " +
                          std::to_string(slices.size()));
    }
    std::vector<ComplexGrid2D> fields(slices.size());
    const auto n = static_cast<std::ptrdiff_t>(slices.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) fields[i] = slices_[i].forward(slices[i]);

    // Fixed summation order keeps the result independent of the thread count.
    RealGrid2D out(config_.geometry());
    for (const auto& f : fields) {
        for (std::size_t p = 0; p < out.size(); ++p) out[p] += f[p].real();
    }
    return out;
}

RealGrid2D HologramOperator::apply(const std::vector<RealGrid2D>& slices) const {
    std::vector<ComplexGrid2D> c;
    c.reserve(slices.size());
    for (const auto& s : slices) c.push_back(to_complex(s));
    return apply(c);
}

std::vector<ComplexGrid2D> HologramOperator::adjoint(const RealGrid2D& intensity) const {
    require_same_shape(config_.geometry(), intensity.geometry(), "HologramOperator::adjoint");
    const ComplexGrid2D y = to_complex(intensity);
    std::vector<ComplexGrid2D> out(slices_.size());
    const auto n = static_cast<std::ptrdiff_t>(slices_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = slices_[i].adjoint(y);
    return out;
}

std::vector<RealGrid2D> HologramOperator::adjoint_real(const RealGrid2D& intensity) const {
    std::vector<RealGrid2D> out;
    for (const auto& c : adjoint(intensity)) out.push_back(real_part(c));
    return out;
}

std::vector<ComplexGrid2D> scaled_object(const ObjectStack& stack, const OpticalConfig& config) {
    const HologramOperator op(config);
    if (stack.size() != op.slice_count()) throw ConfigError("object stack and slice distances disagree");
    require_same_shape(config.geometry(), stack.geometry(), "scaled_object");
    const double a2 = config.illumination_amplitude * config.illumination_amplitude;
    std::vector<ComplexGrid2D> out;
    for (std::size_t z = 0; z < stack.size(); ++z) {
        ComplexGrid2D f(stack[z].geometry());
        const complex_t dc = a2 * op.dc_shares()[z];
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = dc + 2.0 * a2 * stack[z][i];
        out.push_back(std::move(f));
    }
    return out;
}

ComplexGrid2D object_from_scaled(const ComplexGrid2D& scaled, std::size_t slice, const HologramOperator& op) {
    const double a2 = op.config().illumination_amplitude * op.config().illumination_amplitude;
    const complex_t dc = op.dc_shares().at(slice);
    ComplexGrid2D out(scaled.geometry());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (scaled[i] / a2 - dc) / 2.0;
    return out;
}

namespace {

std::vector<ComplexGrid2D> scattered_fields(const ObjectStack& stack, const HologramOperator& op) {
    if (stack.size() != op.slice_count()) throw ConfigError("object stack and slice distances disagree");
    require_same_shape(op.config().geometry(), stack.geometry(), "synthesize");
    const double a = op.config().illumination_amplitude;
    std::vector<ComplexGrid2D> out(stack.size());
    const auto n = static_cast<std::ptrdiff_t>(stack.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t z = 0; z < n; ++z) {
        ComplexGrid2D incident = stack[z];
        for (auto& v : incident) v *= a;
        out[z] = op.slices()[z].forward(incident);
    }
    return out;
}

} // namespace

RealGrid2D synthesize_linear(const ObjectStack& stack, const OpticalConfig& config, SynthesisReport* report) {
    const HologramOperator op(config);
    const auto fields = scattered_fields(stack, op);
    const double a = config.illumination_amplitude;
    RealGrid2D out(config.geometry(), a * a);
    for (const auto& e : fields) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += 2.0 * a * e[i].real();
    }
    std::size_t clamped = 0;
    for (auto& v : out) {
        if (v < 0.0) {
            v = 0.0;
            ++clamped;
        }
    }
    if (clamped > 0) {
        warn("synthesize_linear clamped " + std::to_string(clamped) +
             " negative pixels; the object is outside the weak-scattering regime");
    }
    if (report != nullptr) report->clamped_pixels = clamped;
    return out;
}

RealGrid2D synthesize_full(const ObjectStack& stack, const OpticalConfig& config) {
    const HologramOperator op(config);
    const auto fields = scattered_fields(stack, op);
    const double a = config.illumination_amplitude;
    ComplexGrid2D total(config.geometry(), complex_t(a, 0.0));
    for (const auto& e : fields) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += e[i];
    }
    RealGrid2D out(config.geometry());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(total[i]);
    return out;
}

RealGrid2D add_poisson_noise(const RealGrid2D& intensity, double photon_scale, std::uint64_t seed) {
    if (!(photon_scale > 0.0) || !std::isfinite(photon_scale)) throw ConfigError("photon scale must be positive");
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        if (!(intensity[i] >= 0.0) || !std::isfinite(intensity[i])) {
            throw NumericError("add_poisson_noise: negative or non-finite intensity at (" +
                               std::to_string(i % intensity.width()) + ", " +
                               std::to_string(i / intensity.width()) + ")");
        }
    }
    RealGrid2D out(intensity.geometry());
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        out[i] = static_cast<double>(sample_poisson(photon_scale * intensity[i], rng)) / photon_scale;
    }
    return out;
}

double photon_scale_for_mean_counts(const RealGrid2D& intensity, double counts) {
    const double m = mean(intensity);
    if (!(m > 0.0)) throw NumericError("cannot derive a photon scale from a non-positive mean intensity");
    return counts / m;
}

std::vector<ComplexGrid2D> backpropagate(const RealGrid2D& hologram, const HologramOperator& op) {
    const ComplexGrid2D field = to_complex(hologram);
    std::vector<ComplexGrid2D> out(op.slice_count());
    const auto n = static_cast<std::ptrdiff_t>(op.slice_count());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t z = 0; z < n; ++z) out[z] = op.slices()[z].backpropagate(field);
    return out;
}

} // namespace emholo
