#include "emholo/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace emholo {

namespace {

// FFTW planning is not thread safe but executing an existing plan on new
// arrays is. Plans are created once per (shape, direction) under a lock and
// reused. FFTW_ESTIMATE keeps the plan, and therefore the rounding, identical
// from run to run.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t width, std::size_t height, int sign) {
        const auto key = std::make_tuple(width, height, sign);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const auto n = width * height;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), in, out, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (plan == nullptr) throw NumericError("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

ComplexGrid2D transform(const ComplexGrid2D& grid, int sign) {
    grid.geometry().validate();
    require_finite(grid, sign == FFTW_FORWARD ? "dft2" : "idft2");
    ComplexGrid2D out(grid.geometry());
    fftw_plan plan = PlanCache::instance().get(grid.width(), grid.height(), sign);
    // std::complex<double> is layout compatible with fftw_complex.
    auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<complex_t*>(grid.values().data()));
    auto* out_ptr = reinterpret_cast<fftw_complex*>(out.values().data());
    fftw_execute_dft(plan, in_ptr, out_ptr);
    return out;
}

} // namespace

ComplexGrid2D dft2(const ComplexGrid2D& grid) { return transform(grid, FFTW_FORWARD); }

ComplexGrid2D idft2(const ComplexGrid2D& spectrum) {
    ComplexGrid2D out = transform(spectrum, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

FrequencyGrid frequency_coordinates(std::size_t width, std::size_t height, double pitch_x, double pitch_y) {
    Geometry{width, height, pitch_x, pitch_y}.validate();
    auto axis = [](std::size_t n, double pitch) {
        std::vector<double> v(n);
        const double step = 1.0 / (static_cast<double>(n) * pitch);
        for (std::size_t k = 0; k < n; ++k) {
            const auto signed_k = k < (n + 1) / 2 ? static_cast<double>(k)
                                            : static_cast<double>(k) - static_cast<double>(n);
            v[k] = signed_k * step;
        }
        return v;
    };
    FrequencyGrid f;
    f.vx = axis(width, pitch_x);
    f.vy = axis(height, pitch_y);
    f.dvx = 1.0 / (static_cast<double>(width) * pitch_x);
    f.dvy = 1.0 / (static_cast<double>(height) * pitch_y);
    return f;
}

} // namespace emholo
