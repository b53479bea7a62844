#include "emholo/image_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "emholo/log.hpp"
#include "emholo/run_config.hpp"

namespace emholo {

namespace {

constexpr std::size_t max_dimension = 1u << 15;

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

// Netpbm-style header reader: whitespace separated tokens, '#' comments.
class HeaderReader {
public:
    HeaderReader(const std::string& bytes, const std::filesystem::path& path) : bytes_(bytes), path_(path) {}

    std::string token(const char* what) {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        if (start == pos_) fail(std::string("missing ") + what);
        return bytes_.substr(start, pos_ - start);
    }

    std::size_t dimension(const char* what, std::size_t limit = max_dimension) {
        const std::size_t at = pos_;
        const std::string t = token(what);
        std::size_t v = 0;
        for (char c : t) {
            if (c < '0' || c > '9') fail_at(at, std::string("invalid ") + what + " '" + t + "'");
            v = v * 10 + static_cast<std::size_t>(c - '0');
            if (v > limit) fail_at(at, std::string(what) + " exceeds " + std::to_string(limit));
        }
        return v;
    }

    /// Consumes the single whitespace byte that ends the header.
    std::size_t end_of_header() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            fail("header not terminated by whitespace");
        }
        return pos_ + 1;
    }

    std::size_t position() const { return pos_; }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }

    [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
        throw IoError(path_.string() + ": byte " + std::to_string(at) + ": " + msg);
    }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& bytes_;
    const std::filesystem::path& path_;
    std::size_t pos_ = 0;
};

void check_geometry(const HeaderReader& r, std::size_t w, std::size_t h) {
    if (w < 2 || h < 2) r.fail("image must be at least 2x2, got " + std::to_string(w) + "x" + std::to_string(h));
}

RealGrid2D read_pfm(const std::string& bytes, const std::filesystem::path& path) {
    HeaderReader r(bytes, path);
    const std::string magic = r.token("magic");
    if (magic == "PF") r.fail_at(0, "color PFM is not supported");
    if (magic != "Pf") r.fail_at(0, "not a grayscale PFM");
    const std::size_t w = r.dimension("width");
    const std::size_t h = r.dimension("height");
    check_geometry(r, w, h);
    const std::size_t scale_at = r.position();
    const std::string scale_text = r.token("scale");
    double scale = 0.0;
    try {
        scale = parse_number(scale_text, "scale");
    } catch (const ConfigError&) {
        r.fail_at(scale_at, "invalid scale '" + scale_text + "'");
    }
    if (scale == 0.0) r.fail_at(scale_at, "scale must be non-zero");
    const bool little = scale < 0;
    const std::size_t offset = r.end_of_header();
    const std::size_t need = w * h * 4;
    if (bytes.size() - offset < need) {
        throw IoError(path.string() + ": truncated data: expected " + std::to_string(need) + " bytes, found " +
                      std::to_string(bytes.size() - offset));
    }
    RealGrid2D grid(Geometry{w, h, 1.0, 1.0});
    const bool swap = little != (std::endian::native == std::endian::little);
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t y = h - 1 - row; // PFM stores the bottom row first
        for (std::size_t x = 0; x < w; ++x) {
            std::uint32_t u;
            std::memcpy(&u, bytes.data() + offset + (row * w + x) * 4, 4);
            if (swap) u = __builtin_bswap32(u);
            const float f = std::bit_cast<float>(u);
            if (!std::isfinite(f)) {
                throw IoError(path.string() + ": non-finite sample at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
            }
            grid(x, y) = static_cast<double>(f);
        }
    }
    return grid;
}

RealGrid2D read_pgm(const std::string& bytes, const std::filesystem::path& path) {
    HeaderReader r(bytes, path);
    const std::string magic = r.token("magic");
    if (magic != "P5") r.fail_at(0, "not a binary PGM");
    const std::size_t w = r.dimension("width");
    const std::size_t h = r.dimension("height");
    check_geometry(r, w, h);
    const std::size_t maxval_at = r.position();
    const std::size_t maxval = r.dimension("maxval", 65535);
    if (maxval < 1 || maxval > 65535) r.fail_at(maxval_at, "maxval must be in 1..65535");
    const std::size_t offset = r.end_of_header();
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t need = w * h * bpp;
    if (bytes.size() - offset < need) {
        throw IoError(path.string() + ": truncated data: expected " + std::to_string(need) + " bytes, found " +
                      std::to_string(bytes.size() - offset));
    }
    RealGrid2D grid(Geometry{w, h, 1.0, 1.0});
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
    for (std::size_t i = 0; i < w * h; ++i) {
        const std::size_t v = bpp == 2 ? (std::size_t{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
        if (v > maxval) {
            throw IoError(path.string() + ": sample " + std::to_string(v) + " above maxval at (" +
                          std::to_string(i % w) + ", " + std::to_string(i / w) + ")");
        }
        grid[i] = static_cast<double>(v);
    }
    return grid;
}

void write_sidecar(const std::filesystem::path& image, const ImageMeta& meta) {
    KeyValueDocument d;
    d.set("wavelength", format_double(meta.wavelength));
    d.set("pitch_x", format_double(meta.pitch_x));
    d.set("pitch_y", format_double(meta.pitch_y));
    if (meta.value_scale) d.set("value_scale", format_double(*meta.value_scale));
    if (meta.value_offset) d.set("value_offset", format_double(*meta.value_offset));
    write_all(sidecar_path(image), d.str());
}

ImageMeta read_sidecar(const std::filesystem::path& path) {
    const KeyValueDocument d = KeyValueDocument::load(path);
    ImageMeta m;
    for (const auto& [k, v] : d.entries()) {
        try {
            if (k == "wavelength") {
                m.wavelength = parse_length(v);
            } else if (k == "pitch_x") {
                m.pitch_x = parse_length(v);
            } else if (k == "pitch_y") {
                m.pitch_y = parse_length(v);
            } else if (k == "value_scale") {
                m.value_scale = parse_number(v, k);
            } else if (k == "value_offset") {
                m.value_offset = parse_number(v, k);
            } else {
                throw IoError(path.string() + ": unknown key '" + k + "'");
            }
        } catch (const ConfigError& e) {
            throw IoError(path.string() + ": " + e.what());
        }
    }
    if (!(m.wavelength > 0) || !(m.pitch_x > 0) || !(m.pitch_y > 0)) {
        throw IoError(path.string() + ": wavelength and pitches must be positive");
    }
    return m;
}

} // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& image) {
    return std::filesystem::path(image.string() + ".meta");
}

LoadedImage load_image(const std::filesystem::path& path) {
    const std::string bytes = read_all(path);
    if (bytes.size() < 2) throw IoError(path.string() + ": file too short");
    LoadedImage out;
    if (bytes[0] == 'P' && (bytes[1] == 'f' || bytes[1] == 'F')) {
        out.grid = read_pfm(bytes, path);
    } else if (bytes[0] == 'P' && bytes[1] == '5') {
        out.grid = read_pgm(bytes, path);
    } else {
        throw IoError(path.string() + ": byte 0: unrecognized image format");
    }
    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
        out.meta = read_sidecar(side);
        out.has_sidecar = true;
    } else {
        warn(path.string() + ": no sidecar metadata, assuming 675 nm and 1.12 um pitch");
    }
    if (out.meta.value_scale || out.meta.value_offset) {
        const double s = out.meta.value_scale.value_or(1.0);
        const double o = out.meta.value_offset.value_or(0.0);
        for (auto& v : out.grid) v = o + s * v;
    }
    const Geometry g{out.grid.width(), out.grid.height(), out.meta.pitch_x, out.meta.pitch_y};
    out.grid = RealGrid2D(g, std::move(out.grid.storage()));
    return out;
}

void save_pfm(const std::filesystem::path& path, const RealGrid2D& grid, const ImageMeta& meta) {
    require_finite(grid, "image");
    std::string bytes = "Pf\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n-1.0\n";
    const std::size_t offset = bytes.size();
    bytes.resize(offset + grid.size() * 4);
    const std::size_t w = grid.width();
    const std::size_t h = grid.height();
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t y = h - 1 - row;
        for (std::size_t x = 0; x < w; ++x) {
            std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(grid(x, y)));
            if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
            std::memcpy(bytes.data() + offset + (row * w + x) * 4, &u, 4);
        }
    }
    write_all(path, bytes);
    ImageMeta m = meta;
    m.value_scale.reset();
    m.value_offset.reset();
    write_sidecar(path, m);
}

void save_pgm(const std::filesystem::path& path, const RealGrid2D& grid, const ImageMeta& meta, int bits) {
    if (bits != 8 && bits != 16) throw ConfigError("PGM bit depth must be 8 or 16");
    require_finite(grid, "image");
    const std::size_t maxval = bits == 16 ? 65535 : 255;
    const double lo = min_value(grid);
    const double hi = max_value(grid);
    const double scale = hi > lo ? (hi - lo) / static_cast<double>(maxval) : 1.0;
    std::string bytes = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n" +
                        std::to_string(maxval) + "\n";
    const std::size_t offset = bytes.size();
    const std::size_t bpp = bits == 16 ? 2 : 1;
    bytes.resize(offset + grid.size() * bpp);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto v = static_cast<std::uint32_t>(std::lround((grid[i] - lo) / scale));
        if (bpp == 2) {
            bytes[offset + 2 * i] = static_cast<char>(v >> 8);
            bytes[offset + 2 * i + 1] = static_cast<char>(v & 0xff);
        } else {
            bytes[offset + i] = static_cast<char>(v);
        }
    }
    write_all(path, bytes);
    ImageMeta m = meta;
    m.value_scale = scale;
    m.value_offset = lo;
    write_sidecar(path, m);
}

ImageMeta meta_for(const Geometry& geometry, double wavelength) {
    ImageMeta m;
    m.wavelength = wavelength;
    m.pitch_x = geometry.pitch_x;
    m.pitch_y = geometry.pitch_y;
    return m;
}

} // namespace emholo
