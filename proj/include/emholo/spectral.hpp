#pragma once

#include <vector>

#include "emholo/grid.hpp"

namespace emholo {

/// Unnormalized forward 2D DFT.
///
/// Convention used throughout the library: the forward transform carries no
/// scale factor and idft2 applies 1/(W*H), so idft2(dft2(x)) == x.
/// Any W, H >= 2 is accepted. Non-finite input throws NumericError.
ComplexGrid2D dft2(const ComplexGrid2D& grid);

/// Inverse 2D DFT, scaled by 1/(W*H).
ComplexGrid2D idft2(const ComplexGrid2D& spectrum);

/// FFT-ordered spatial frequencies in cycles per meter.
struct FrequencyGrid {
    std::vector<double> vx; // length width
    std::vector<double> vy; // length height
    double dvx = 0.0;
    double dvy = 0.0;
};

/// Index k maps to k/(N*pitch) for k < (N+1)/2 and (k-N)/(N*pitch) otherwise.
FrequencyGrid frequency_coordinates(std::size_t width, std::size_t height, double pitch_x, double pitch_y);

inline FrequencyGrid frequency_coordinates(const Geometry& g) {
    return frequency_coordinates(g.width, g.height, g.pitch_x, g.pitch_y);
}

} // namespace emholo
