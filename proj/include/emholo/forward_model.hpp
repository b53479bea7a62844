#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "emholo/grid.hpp"
#include "emholo/propagation.hpp"

namespace emholo {

/// Acquisition geometry and illumination. SI units throughout.
struct OpticalConfig {
    double wavelength = 675e-9;
    double pitch = 1.12e-6;
    std::size_t width = 512;
    std::size_t height = 512;
    /// Real plane-wave amplitude at the sensor.
    double illumination_amplitude = 1.0;
    /// Sensor-to-slice distances, strictly increasing and positive.
    std::vector<double> slice_distances{1e-3};
    Padding padding = Padding::Zero;
    /// Reference the slice operator to the local illumination phase (see SlicePropagator).
    bool reference_phased = true;

    Geometry geometry() const { return {width, height, pitch, pitch}; }
    std::size_t slice_count() const noexcept { return slice_distances.size(); }
    void validate() const;
};

/// Object slices o(x, z): complex transmittance perturbations, one per distance.
class ObjectStack {
public:
    ObjectStack() = default;
    ObjectStack(std::vector<ComplexGrid2D> slices, bool real_only);

    static ObjectStack from_real(const std::vector<RealGrid2D>& slices);

    const std::vector<ComplexGrid2D>& slices() const noexcept { return slices_; }
    const ComplexGrid2D& operator[](std::size_t i) const { return slices_.at(i); }
    std::size_t size() const noexcept { return slices_.size(); }
    bool real_only() const noexcept { return real_only_; }
    const Geometry& geometry() const { return slices_.front().geometry(); }

    std::vector<RealGrid2D> real_parts() const;
    std::vector<RealGrid2D> imag_parts() const;

private:
    std::vector<ComplexGrid2D> slices_;
    bool real_only_ = false;
};

/// Measured or simulated intensity record with the settings that produced it.
struct Hologram {
    RealGrid2D intensity;
    OpticalConfig config;
    std::optional<std::uint64_t> noise_seed;
    double photon_scale = 1.0;
};

/// The linearized hologram operator and its adjoint, one slice propagator per distance.
///
/// For a stack of scaled objects f_z the predicted intensity is
/// Re[sum_z T_z f_z]. For real inputs this is H_re f; for complex inputs it is
/// H_re f_re - H_im f_im. The adjoint of a real intensity y onto slice z is the
/// complex field T_z^* y whose real part is H_re^* y and whose imaginary part is
/// the f_im component of H_c^* y.
class HologramOperator {
public:
    explicit HologramOperator(const OpticalConfig& config);

    RealGrid2D apply(const std::vector<RealGrid2D>& slices) const;
    RealGrid2D apply(const std::vector<ComplexGrid2D>& slices) const;

    std::vector<ComplexGrid2D> adjoint(const RealGrid2D& intensity) const;
    std::vector<RealGrid2D> adjoint_real(const RealGrid2D& intensity) const;

    /// Per-slice H_c^* 1. Constant (l_re, -l_im) on a circular grid; computed
    /// explicitly when padding makes it vary near the border.
    const std::vector<ComplexGrid2D>& ones_adjoint() const noexcept { return ones_adjoint_; }

    /// Scaled-object share of the illumination DC assigned to each slice: 1/(S c_z).
    const std::vector<complex_t>& dc_shares() const noexcept { return dc_shares_; }

    const std::vector<SlicePropagator>& slices() const noexcept { return slices_; }
    const OpticalConfig& config() const noexcept { return config_; }
    std::size_t slice_count() const noexcept { return slices_.size(); }

private:
    OpticalConfig config_;
    std::vector<SlicePropagator> slices_;
    std::vector<ComplexGrid2D> ones_adjoint_;
    std::vector<complex_t> dc_shares_;
};

/// f_z = |A|^2 / (S c_z) + 2 |A|^2 o_z: the object with the illumination DC folded in.
std::vector<ComplexGrid2D> scaled_object(const ObjectStack& stack, const OpticalConfig& config);

/// Inverse of scaled_object for one slice: o_z = (f_z / |A|^2 - 1/(S c_z)) / 2.
ComplexGrid2D object_from_scaled(const ComplexGrid2D& scaled, std::size_t slice, const HologramOperator& op);

struct SynthesisReport {
    std::size_t clamped_pixels = 0;
};

/// Born-linearized hologram |A|^2 + 2 Re[A^* sum_z T_z(A o_z)].
/// Negative samples (Born expansion violated) are clamped to 0, counted and warned about.
RealGrid2D synthesize_linear(const ObjectStack& stack, const OpticalConfig& config,
                             SynthesisReport* report = nullptr);

/// Full interference intensity |A + sum_z T_z(A o_z)|^2, including |E|^2.
RealGrid2D synthesize_full(const ObjectStack& stack, const OpticalConfig& config);

/// Each pixel becomes Poisson(photon_scale * I) / photon_scale, pixel i drawing
/// from CounterRng(seed, i).
RealGrid2D add_poisson_noise(const RealGrid2D& intensity, double photon_scale, std::uint64_t seed);

/// Photon scale that maps the mean of `intensity` to `counts` per pixel.
double photon_scale_for_mean_counts(const RealGrid2D& intensity, double counts = 1e4);

/// Plain backpropagation of the hologram to each slice (SlicePropagator::backpropagate).
std::vector<ComplexGrid2D> backpropagate(const RealGrid2D& hologram, const HologramOperator& op);

} // namespace emholo
