#include "emholo/propagation.hpp"

#include <algorithm>

#include "emholo/spectral.hpp"

namespace emholo {

namespace {

void require_wavelength(double wavelength) {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw ConfigError("wavelength must be positive and finite");
    }
}

} // namespace

TransferFunction transfer_function(const Geometry& shape, double wavelength, double z) {
    require_wavelength(wavelength);
    if (!std::isfinite(z)) throw ConfigError("propagation distance must be finite");
    const FrequencyGrid freq = frequency_coordinates(shape);
    const double k0 = wavenumber(wavelength);
    const double cutoff2 = 1.0 / (wavelength * wavelength);

    TransferFunction tf{ComplexGrid2D(shape), z, wavelength};
    for (std::size_t y = 0; y < shape.height; ++y) {
        const double vy = freq.vy[y];
        for (std::size_t x = 0; x < shape.width; ++x) {
            const double vx = freq.vx[x];
            const double v2 = vx * vx + vy * vy;
            if (v2 < cutoff2) {
                const double kz = k0 * z * std::sqrt(1.0 - wavelength * wavelength * v2);
                tf.spectrum(x, y) = complex_t(std::cos(kz), std::sin(kz));
            }
        }
    }
    return tf;
}

ComplexGrid2D propagate(const ComplexGrid2D& field, double z, double wavelength) {
    const TransferFunction tf = transfer_function(field.geometry(), wavelength, z);
    ComplexGrid2D spectrum = dft2(field);
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= tf.spectrum[i];
    return idft2(spectrum);
}

KernelSums kernel_sums(double wavelength, double z) {
    require_wavelength(wavelength);
    const double phase = wavenumber(wavelength) * z;
    return {std::cos(phase), std::sin(phase)};
}

SlicePropagator::SlicePropagator(const Geometry& geometry, double wavelength, double z, Padding padding,
                                 bool reference_phased)
    : geometry_(geometry),
      work_geometry_(geometry),
      wavelength_(wavelength),
      z_(z),
      padding_(padding),
      reference_phased_(reference_phased) {
    geometry_.validate();
    require_wavelength(wavelength);
    if (padding_ == Padding::Zero) {
        work_geometry_.width = 2 * geometry_.width;
        work_geometry_.height = 2 * geometry_.height;
        offset_x_ = geometry_.width / 2;
        offset_y_ = geometry_.height / 2;
    }
    multiplier_ = transfer_function(work_geometry_, wavelength_, z_).spectrum;
    if (reference_phased_) {
        const double phase = -wavenumber(wavelength_) * z_;
        const complex_t carrier(std::cos(phase), std::sin(phase));
        for (auto& v : multiplier_) v *= carrier;
    }
}

KernelSums SlicePropagator::effective_kernel_sums() const {
    const KernelSums raw = kernel_sums(wavelength_, z_);
    if (!reference_phased_) return raw;
    // exp(j k0 z) * exp(-j k0 z)
    const complex_t c = complex_t(raw.re, raw.im) * std::conj(complex_t(raw.re, raw.im));
    return {c.real(), c.imag()};
}

ComplexGrid2D SlicePropagator::apply(const ComplexGrid2D& work, bool conjugate) const {
    ComplexGrid2D spectrum = dft2(work);
    if (conjugate) {
        for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= std::conj(multiplier_[i]);
    } else {
        for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= multiplier_[i];
    }
    return idft2(spectrum);
}

ComplexGrid2D SlicePropagator::forward(const ComplexGrid2D& field) const {
    require_same_shape(geometry_, field.geometry(), "SlicePropagator::forward");
    if (padding_ == Padding::None) return apply(field, false);
    return crop(apply(extend(field), false));
}

ComplexGrid2D SlicePropagator::adjoint(const ComplexGrid2D& field) const {
    require_same_shape(geometry_, field.geometry(), "SlicePropagator::adjoint");
    if (padding_ == Padding::None) return apply(field, true);
    return extend_adjoint(apply(embed(field), true));
}

ComplexGrid2D SlicePropagator::backpropagate(const ComplexGrid2D& field) const {
    require_same_shape(geometry_, field.geometry(), "SlicePropagator::backpropagate");
    if (padding_ == Padding::None) return apply(field, true);
    return crop(apply(extend(field), true));
}

ComplexGrid2D SlicePropagator::extend(const ComplexGrid2D& field) const {
    complex_t m = 0.0;
    for (const auto& v : field) m += v;
    m /= static_cast<double>(field.size());
    ComplexGrid2D out(work_geometry_, m);
    for (std::size_t y = 0; y < geometry_.height; ++y) {
        for (std::size_t x = 0; x < geometry_.width; ++x) out(x + offset_x_, y + offset_y_) = field(x, y);
    }
    return out;
}

ComplexGrid2D SlicePropagator::extend_adjoint(const ComplexGrid2D& field) const {
    // extend = embed (I - M) + (mean over the work grid); M projects onto constants.
    ComplexGrid2D out = crop(field);
    complex_t inner = 0.0;
    for (const auto& v : out) inner += v;
    complex_t total = 0.0;
    for (const auto& v : field) total += v;
    const complex_t shift = (total - inner) / static_cast<double>(out.size());
    for (auto& v : out) v += shift;
    return out;
}

ComplexGrid2D SlicePropagator::embed(const ComplexGrid2D& field) const {
    ComplexGrid2D out(work_geometry_);
    for (std::size_t y = 0; y < geometry_.height; ++y) {
        for (std::size_t x = 0; x < geometry_.width; ++x) out(x + offset_x_, y + offset_y_) = field(x, y);
    }
    return out;
}

ComplexGrid2D SlicePropagator::crop(const ComplexGrid2D& field) const {
    ComplexGrid2D out(geometry_);
    for (std::size_t y = 0; y < geometry_.height; ++y) {
        for (std::size_t x = 0; x < geometry_.width; ++x) out(x, y) = field(x + offset_x_, y + offset_y_);
    }
    return out;
}

} // namespace emholo
