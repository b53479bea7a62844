#pragma once

#include <filesystem>
#include <optional>

#include "emholo/grid.hpp"

namespace emholo {

/// Physical metadata kept next to an image in "<image>.meta" as `key = value` lines.
struct ImageMeta {
    double wavelength = 675e-9;
    double pitch_x = 1.12e-6;
    double pitch_y = 1.12e-6;
    /// Graymaps only: physical value = offset + scale * count.
    std::optional<double> value_scale;
    std::optional<double> value_offset;
};

struct LoadedImage {
    RealGrid2D grid;
    ImageMeta meta;
    /// False when no sidecar was found and the defaults were used.
    bool has_sidecar = false;
};

std::filesystem::path sidecar_path(const std::filesystem::path& image);

/// Reads a grayscale PFM ("Pf", 32-bit float, either byte order) or a binary
/// PGM ("P5", 8 or 16 bit). Pitch and wavelength come from the sidecar; when it
/// is missing the defaults (675 nm, 1.12 um) are used and a warning is logged.
/// Malformed headers, oversized dimensions, truncated data and non-finite
/// samples throw IoError naming the offending position.
LoadedImage load_image(const std::filesystem::path& path);

/// Little-endian grayscale PFM plus sidecar. Samples are stored as float32.
void save_pfm(const std::filesystem::path& path, const RealGrid2D& grid, const ImageMeta& meta);

/// Binary PGM (8 or 16 bit) plus sidecar. The grid is mapped linearly from
/// [min, max] onto [0, 2^bits - 1]; the mapping is written to the sidecar so
/// load_image restores physical values.
void save_pgm(const std::filesystem::path& path, const RealGrid2D& grid, const ImageMeta& meta, int bits = 16);

ImageMeta meta_for(const Geometry& geometry, double wavelength);

} // namespace emholo
