#pragma once

#include "emholo/grid.hpp"

namespace emholo {

/// Band-limited angular-spectrum transfer function, FFT-ordered.
///
/// Inside the band sqrt(vx^2 + vy^2) < 1/lambda the entry is
/// exp(j k0 z sqrt(1 - (lambda vx)^2 - (lambda vy)^2)); outside it is exactly 0.
struct TransferFunction {
    ComplexGrid2D spectrum;
    double z = 0.0;
    double wavelength = 0.0;
};

TransferFunction transfer_function(const Geometry& shape, double wavelength, double z);

/// idft2(dft2(field) * H_z). Negative z backpropagates. Circular boundary.
ComplexGrid2D propagate(const ComplexGrid2D& field, double z, double wavelength);

/// Sums of the real and imaginary parts of the sampled impulse response,
/// i.e. the zero-frequency transfer value exp(j k0 z).
struct KernelSums {
    double re = 1.0;
    double im = 0.0;
};

KernelSums kernel_sums(double wavelength, double z);

inline double wavenumber(double wavelength) { return 2.0 * 3.14159265358979323846 / wavelength; }

enum class Padding {
    None,      // circular convolution on the native grid
    Zero,      // zero-pad the mean-removed field to 2W x 2H, the mean fills the pad
};

/// Linear slice operator used by the hologram model.
///
/// forward(f) = crop(T(extend(f))) and adjoint(y) = extend*(T*(embed(y))),
/// where T multiplies the spectrum by H_z and, when `reference_phased` is set,
/// by exp(-j k0 z). That extra factor is the phase the illuminating plane wave
/// accumulates between the slice and the sensor, so A* E carries no carrier
/// and the kernel sum seen by the model is 1 instead of exp(j k0 z).
///
/// With Padding::Zero the field's mean is subtracted, the remainder is
/// zero-padded and the mean is added back over the whole work grid. The map is
/// linear, constants stay constant (so the DC term of the scaled object passes
/// unchanged) and structure near the border does not wrap around.
class SlicePropagator {
public:
    SlicePropagator(const Geometry& geometry, double wavelength, double z, Padding padding,
                    bool reference_phased);

    ComplexGrid2D forward(const ComplexGrid2D& field) const;
    ComplexGrid2D adjoint(const ComplexGrid2D& field) const;

    /// Refocuses a sensor-plane image onto the slice: crop(T*(extend(field))).
    /// Equals adjoint() without padding. With padding the image is extended
    /// like an object, so its mean does not diffract off the zero border.
    ComplexGrid2D backpropagate(const ComplexGrid2D& field) const;

    /// Kernel sums of the effective impulse response (carrier removed if reference phased).
    KernelSums effective_kernel_sums() const;

    const Geometry& geometry() const noexcept { return geometry_; }
    double z() const noexcept { return z_; }
    double wavelength() const noexcept { return wavelength_; }
    Padding padding() const noexcept { return padding_; }
    bool reference_phased() const noexcept { return reference_phased_; }

private:
    ComplexGrid2D extend(const ComplexGrid2D& field) const;
    ComplexGrid2D extend_adjoint(const ComplexGrid2D& field) const;
    ComplexGrid2D embed(const ComplexGrid2D& field) const;
    ComplexGrid2D crop(const ComplexGrid2D& field) const;
    ComplexGrid2D apply(const ComplexGrid2D& work, bool conjugate) const;

    Geometry geometry_;
    Geometry work_geometry_;
    double wavelength_;
    double z_;
    Padding padding_;
    bool reference_phased_;
    std::size_t offset_x_ = 0;
    std::size_t offset_y_ = 0;
    ComplexGrid2D multiplier_;
};

} // namespace emholo
