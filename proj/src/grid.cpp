#include "emholo/grid.hpp"

#include <algorithm>
#include <numeric>

namespace emholo {

void Geometry::validate() const {
    if (width < 2 || height < 2) {
        throw ConfigError("grid must be at least 2x2, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (!(pitch_x > 0.0) || !(pitch_y > 0.0) || !std::isfinite(pitch_x) || !std::isfinite(pitch_y)) {
        throw ConfigError("pixel pitch must be positive and finite");
    }
}

void require_same_shape(const Geometry& a, const Geometry& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ConfigError(std::string(what) + ": geometry mismatch (" + std::to_string(a.width) + "x" +
                          std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                          std::to_string(b.height) + ")");
    }
}

namespace {

template <class F>
RealGrid2D map_to_real(const ComplexGrid2D& grid, F f) {
    RealGrid2D out(grid.geometry());
    std::transform(grid.begin(), grid.end(), out.begin(), f);
    return out;
}

} // namespace

RealGrid2D real_part(const ComplexGrid2D& grid) {
    return map_to_real(grid, [](const complex_t& c) { return c.real(); });
}

RealGrid2D imag_part(const ComplexGrid2D& grid) {
    return map_to_real(grid, [](const complex_t& c) { return c.imag(); });
}

RealGrid2D abs(const ComplexGrid2D& grid) {
    return map_to_real(grid, [](const complex_t& c) { return std::abs(c); });
}

RealGrid2D arg(const ComplexGrid2D& grid) {
    return map_to_real(grid, [](const complex_t& c) { return std::arg(c); });
}

ComplexGrid2D to_complex(const RealGrid2D& re) {
    ComplexGrid2D out(re.geometry());
    std::transform(re.begin(), re.end(), out.begin(), [](double v) { return complex_t(v, 0.0); });
    return out;
}

ComplexGrid2D to_complex(const RealGrid2D& re, const RealGrid2D& im) {
    require_same_shape(re.geometry(), im.geometry(), "to_complex");
    ComplexGrid2D out(re.geometry());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = complex_t(re[i], im[i]);
    return out;
}

double sum(const RealGrid2D& grid) { return std::accumulate(grid.begin(), grid.end(), 0.0); }

double mean(const RealGrid2D& grid) { return sum(grid) / static_cast<double>(grid.size()); }

double min_value(const RealGrid2D& grid) { return *std::min_element(grid.begin(), grid.end()); }

double max_value(const RealGrid2D& grid) { return *std::max_element(grid.begin(), grid.end()); }

double dot(const RealGrid2D& a, const RealGrid2D& b) {
    require_same_shape(a.geometry(), b.geometry(), "dot");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double dot(const ComplexGrid2D& a, const ComplexGrid2D& b) {
    require_same_shape(a.geometry(), b.geometry(), "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] * std::conj(b[i])).real();
    return acc;
}

double norm2(const RealGrid2D& grid) { return std::sqrt(dot(grid, grid)); }

double norm2(const ComplexGrid2D& grid) {
    double acc = 0.0;
    for (const auto& c : grid) acc += std::norm(c);
    return std::sqrt(acc);
}

} // namespace emholo
