#include "emholo/phantoms.hpp"

#include <functional>

namespace emholo::phantoms {

namespace {

using Shape = std::function<bool(double, double)>;

Shape disk(double cx, double cy, double r) {
    return [=](double u, double v) { return (u - cx) * (u - cx) + (v - cy) * (v - cy) <= r * r; };
}

Shape ring(double cx, double cy, double r_in, double r_out) {
    return [=](double u, double v) {
        const double d2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
        return d2 <= r_out * r_out && d2 >= r_in * r_in;
    };
}

Shape rect(double x0, double x1, double y0, double y1) {
    return [=](double u, double v) { return u >= x0 && u <= x1 && v >= y0 && v <= y1; };
}

Shape square(double cx, double cy, double side) {
    return rect(cx - side / 2, cx + side / 2, cy - side / 2, cy + side / 2);
}

std::vector<Shape> pattern_shapes(int pattern) {
    switch (pattern) {
    case 0:
        return {disk(0.25, 0.25, 0.06), disk(0.75, 0.25, 0.05), disk(0.25, 0.75, 0.04)};
    case 1:
        return {rect(0.40, 0.60, 0.20, 0.26), rect(0.72, 0.78, 0.55, 0.85), rect(0.40, 0.60, 0.78, 0.84)};
    case 2:
        return {ring(0.5, 0.5, 0.08, 0.12), rect(0.13, 0.23, 0.485, 0.515), rect(0.165, 0.195, 0.45, 0.55)};
    case 3: // phase squares used by the complex scene
        return {square(0.5, 0.3, 0.12), square(0.35, 0.6, 0.10), square(0.7, 0.7, 0.14)};
    default:
        throw ConfigError("unknown phantom pattern " + std::to_string(pattern));
    }
}

RealGrid2D render(const Geometry& geometry, const std::vector<Shape>& shapes, double value) {
    RealGrid2D out(geometry);
    for (std::size_t y = 0; y < geometry.height; ++y) {
        const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(geometry.height);
        for (std::size_t x = 0; x < geometry.width; ++x) {
            const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(geometry.width);
            for (const auto& s : shapes) {
                if (s(u, v)) {
                    out(x, y) = value;
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace

RealGrid2D sparse_pattern(const Geometry& geometry, int pattern, double amplitude) {
    if (pattern < 0 || pattern > 2) throw ConfigError("sparse pattern index must be 0, 1 or 2");
    return render(geometry, pattern_shapes(pattern), -amplitude);
}

ObjectStack multi_depth(const Geometry& geometry, std::size_t slices, double amplitude) {
    std::vector<RealGrid2D> s;
    for (std::size_t i = 0; i < slices; ++i) s.push_back(sparse_pattern(geometry, static_cast<int>(i % 3), amplitude));
    return ObjectStack::from_real(s);
}

ObjectStack complex_object(const Geometry& geometry, double re_amplitude, double im_amplitude) {
    const RealGrid2D re = render(geometry, pattern_shapes(0), -re_amplitude);
    const RealGrid2D im = render(geometry, pattern_shapes(3), im_amplitude);
    return ObjectStack({to_complex(re, im)}, false);
}

RealGrid2D support(const RealGrid2D& slice) {
    RealGrid2D out(slice.geometry());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = slice[i] != 0.0 ? 1.0 : 0.0;
    return out;
}

ObjectStack by_name(const std::string& name, const Geometry& geometry, std::size_t slices) {
    if (name == "sparse3" || name == "sparse") return multi_depth(geometry, slices, 0.1);
    if (name == "sparse1") return multi_depth(geometry, 1, 0.1);
    if (name == "complex") return complex_object(geometry, 0.1, 0.1);
    throw ConfigError("unknown phantom '" + name + "' (expected sparse3, sparse1 or complex)");
}

} // namespace emholo::phantoms
