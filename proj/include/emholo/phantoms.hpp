#pragma once

#include <string>

#include "emholo/forward_model.hpp"

namespace emholo {

/// Deterministic sparse test objects. Shapes are laid out in fractional
/// coordinates so the same scene renders at any grid size.
namespace phantoms {

/// Absorbing features (o = -amplitude inside, 0 elsewhere). Patterns 0, 1 and 2
/// are disks, bars and a ring with a cross, placed so that their supports do
/// not overlap laterally.
RealGrid2D sparse_pattern(const Geometry& geometry, int pattern, double amplitude);

/// One absorbing pattern per slice, pattern index = slice index mod 3.
ObjectStack multi_depth(const Geometry& geometry, std::size_t slices, double amplitude);

/// Single slice with distinct real (absorbing disks, -re_amplitude) and
/// imaginary (phase squares, +im_amplitude) patterns.
ObjectStack complex_object(const Geometry& geometry, double re_amplitude, double im_amplitude);

/// Support mask (1 inside, 0 outside) of a pattern.
RealGrid2D support(const RealGrid2D& slice);

/// Built-in scene names accepted by the CLI: "sparse3", "sparse1", "complex".
ObjectStack by_name(const std::string& name, const Geometry& geometry, std::size_t slices);

} // namespace phantoms
} // namespace emholo
