#include <cmath>

#include "emholo/recon_em.hpp"

namespace emholo {

namespace {

// Forward differences with a replicate boundary: the last column (row) has zero x (y) difference.
inline double diff_x(const RealGrid2D& w, std::size_t x, std::size_t y) {
    return x + 1 < w.width() ? w(x + 1, y) - w(x, y) : 0.0;
}

inline double diff_y(const RealGrid2D& w, std::size_t x, std::size_t y) {
    return y + 1 < w.height() ? w(x, y + 1) - w(x, y) : 0.0;
}

} // namespace

double tv_value(const RealGrid2D& w) {
    double acc = 0.0;
    for (std::size_t y = 0; y < w.height(); ++y) {
        for (std::size_t x = 0; x < w.width(); ++x) acc += std::hypot(diff_x(w, x, y), diff_y(w, x, y));
    }
    return acc;
}

double tv_value_smoothed(const RealGrid2D& w, double eps) {
    double acc = 0.0;
    for (std::size_t y = 0; y < w.height(); ++y) {
        for (std::size_t x = 0; x < w.width(); ++x) {
            const double dx = diff_x(w, x, y);
            const double dy = diff_y(w, x, y);
            acc += std::sqrt(dx * dx + dy * dy + eps * eps);
        }
    }
    return acc;
}

RealGrid2D tv_gradient(const RealGrid2D& w, double eps) {
    if (!(eps > 0.0)) throw ConfigError("TV smoothing epsilon must be positive");
    RealGrid2D px(w.geometry());
    RealGrid2D py(w.geometry());
    for (std::size_t y = 0; y < w.height(); ++y) {
        for (std::size_t x = 0; x < w.width(); ++x) {
            const double dx = diff_x(w, x, y);
            const double dy = diff_y(w, x, y);
            const double n = std::sqrt(dx * dx + dy * dy + eps * eps);
            px(x, y) = dx / n;
            py(x, y) = dy / n;
        }
    }
    // Backward-difference divergence; px vanishes on the last column and py on
    // the last row, which makes -div the exact adjoint of the forward difference.
    RealGrid2D out(w.geometry());
    for (std::size_t y = 0; y < w.height(); ++y) {
        for (std::size_t x = 0; x < w.width(); ++x) {
            double div = px(x, y) + py(x, y);
            if (x > 0) div -= px(x - 1, y);
            if (y > 0) div -= py(x, y - 1);
            out(x, y) = -div;
        }
    }
    return out;
}

} // namespace emholo
