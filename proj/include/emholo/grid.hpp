#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emholo/error.hpp"

namespace emholo {

using complex_t = std::complex<double>;

/// Sampling geometry shared by every grid: lattice shape plus physical pitch.
struct Geometry {
    std::size_t width = 0;
    std::size_t height = 0;
    double pitch_x = 1.0; // meters per pixel
    double pitch_y = 1.0;

    std::size_t size() const noexcept { return width * height; }

    bool same_shape(const Geometry& other) const noexcept {
        return width == other.width && height == other.height;
    }

    bool operator==(const Geometry&) const = default;

    /// Throws ConfigError unless width, height >= 2 and both pitches are positive.
    void validate() const;
};

/// Row-major 2D lattice of samples with physical pixel pitch.
///
/// Grids are plain values: every operation in the library returns a new grid
/// and never mutates its inputs, so a grid may be handed to another thread
/// without synchronization.
template <class T>
class Grid2D {
public:
    using value_type = T;

    Grid2D() = default;

    explicit Grid2D(const Geometry& geometry, T fill = T{})
        : geometry_(geometry), data_((geometry.validate(), geometry.size()), fill) {}

    Grid2D(std::size_t width, std::size_t height, double pitch_x, double pitch_y, T fill = T{})
        : Grid2D(Geometry{width, height, pitch_x, pitch_y}, fill) {}

    Grid2D(const Geometry& geometry, std::vector<T> data) : geometry_(geometry), data_(std::move(data)) {
        geometry_.validate();
        if (data_.size() != geometry_.size()) {
            throw ConfigError("grid data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(geometry_.width) + "x" + std::to_string(geometry_.height));
        }
    }

    const Geometry& geometry() const noexcept { return geometry_; }
    std::size_t width() const noexcept { return geometry_.width; }
    std::size_t height() const noexcept { return geometry_.height; }
    std::size_t size() const noexcept { return data_.size(); }
    double pitch_x() const noexcept { return geometry_.pitch_x; }
    double pitch_y() const noexcept { return geometry_.pitch_y; }

    T& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * geometry_.width + x]; }
    const T& operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * geometry_.width + x]; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool operator==(const Grid2D&) const = default;

private:
    Geometry geometry_;
    std::vector<T> data_;
};

using ComplexGrid2D = Grid2D<complex_t>;
using RealGrid2D = Grid2D<double>;

inline bool is_finite(double v) noexcept { return std::isfinite(v); }
inline bool is_finite(const complex_t& v) noexcept { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

/// Throws NumericError naming the first offending pixel if any sample is NaN or infinite.
template <class T>
void require_finite(const Grid2D<T>& grid, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!is_finite(grid[i])) {
            throw NumericError(std::string(what) + ": non-finite sample at (" + std::to_string(i % grid.width()) +
                               ", " + std::to_string(i / grid.width()) + ")");
        }
    }
}

void require_same_shape(const Geometry& a, const Geometry& b, const char* what);

RealGrid2D real_part(const ComplexGrid2D& grid);
RealGrid2D imag_part(const ComplexGrid2D& grid);
RealGrid2D abs(const ComplexGrid2D& grid);
RealGrid2D arg(const ComplexGrid2D& grid);
ComplexGrid2D to_complex(const RealGrid2D& re);
ComplexGrid2D to_complex(const RealGrid2D& re, const RealGrid2D& im);

double sum(const RealGrid2D& grid);
double mean(const RealGrid2D& grid);
double min_value(const RealGrid2D& grid);
double max_value(const RealGrid2D& grid);

/// Real inner product sum(a * b).
double dot(const RealGrid2D& a, const RealGrid2D& b);
/// Real part of sum(a * conj(b)).
double dot(const ComplexGrid2D& a, const ComplexGrid2D& b);

double norm2(const RealGrid2D& grid);
double norm2(const ComplexGrid2D& grid);

} // namespace emholo
