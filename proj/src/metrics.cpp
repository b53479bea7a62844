#include "emholo/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>

#include "emholo/log.hpp"
#include "emholo/propagation.hpp"

namespace emholo {

double mse(const RealGrid2D& a, const RealGrid2D& b) {
    require_same_shape(a.geometry(), b.geometry(), "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr_from_mse(double mse_value, double peak) {
    if (!(peak > 0.0)) throw ConfigError("PSNR peak must be positive");
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse_value);
}

double psnr(const RealGrid2D& a, const RealGrid2D& b, double peak) { return psnr_from_mse(mse(a, b), peak); }

namespace {

std::vector<double> gaussian_window(std::size_t size, double sigma) {
    std::vector<double> w(size);
    const double c = static_cast<double>(size / 2);
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double d = static_cast<double>(i) - c;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += w[i];
    }
    for (auto& v : w) v /= total;
    return w;
}

// Separable "valid" correlation: output is (W - k + 1) x (H - k + 1).
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t width, std::size_t height,
                                 const std::vector<double>& kernel) {
    const std::size_t k = kernel.size();
    const std::size_t ow = width - k + 1;
    const std::size_t oh = height - k + 1;
    std::vector<double> rows(ow * height);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += kernel[i] * img[y * width + x + i];
            rows[y * ow + x] = acc;
        }
    }
    std::vector<double> out(ow * oh);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += kernel[i] * rows[(y + i) * ow + x];
            out[y * ow + x] = acc;
        }
    }
    return out;
}

double peak_abs(const RealGrid2D& a) {
    double p = 0.0;
    for (double v : a) p = std::max(p, std::fabs(v));
    return p;
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

} // namespace

double ssim(const RealGrid2D& a, const RealGrid2D& b, std::optional<double> data_range) {
    require_same_shape(a.geometry(), b.geometry(), "ssim");
    std::size_t window = std::min<std::size_t>({11, a.width(), a.height()});
    if (window % 2 == 0) --window;
    const auto kernel = gaussian_window(window, 1.5);

    double range = data_range.value_or(std::max(peak_abs(a), peak_abs(b)));
    if (!(range > 0.0)) range = 1.0;
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);

    const auto w = a.width();
    const auto h = a.height();
    const std::vector<double>& av = a.storage();
    const std::vector<double>& bv = b.storage();
    std::vector<double> aa(av.size());
    std::vector<double> bb(av.size());
    std::vector<double> ab(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
        aa[i] = av[i] * av[i];
        bb[i] = bv[i] * bv[i];
        ab[i] = av[i] * bv[i];
    }
    const auto mu_a = filter_valid(av, w, h, kernel);
    const auto mu_b = filter_valid(bv, w, h, kernel);
    const auto e_aa = filter_valid(aa, w, h, kernel);
    const auto e_bb = filter_valid(bb, w, h, kernel);
    const auto e_ab = filter_valid(ab, w, h, kernel);

    double acc = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return acc / static_cast<double>(mu_a.size());
}

RealGrid2D median_filter(const RealGrid2D& a, std::size_t k) {
    if (k < 3 || k % 2 == 0) throw ConfigError("median filter size must be odd and at least 3");
    const auto r = static_cast<std::ptrdiff_t>(k / 2);
    RealGrid2D out(a.geometry());
    std::vector<double> window(k * k);
    for (std::size_t y = 0; y < a.height(); ++y) {
        for (std::size_t x = 0; x < a.width(); ++x) {
            std::size_t n = 0;
            for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
                const auto sy = clamp_index(static_cast<std::ptrdiff_t>(y) + dy, a.height());
                for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
                    window[n++] = a(clamp_index(static_cast<std::ptrdiff_t>(x) + dx, a.width()), sy);
                }
            }
            auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
            std::nth_element(window.begin(), mid, window.end());
            out(x, y) = *mid;
        }
    }
    return out;
}

RealGrid2D mean_filter(const RealGrid2D& a, std::size_t k) {
    if (k < 1 || k % 2 == 0) throw ConfigError("mean filter size must be odd");
    const auto r = static_cast<std::ptrdiff_t>(k / 2);
    const double norm = 1.0 / static_cast<double>(k * k);
    RealGrid2D out(a.geometry());
    for (std::size_t y = 0; y < a.height(); ++y) {
        for (std::size_t x = 0; x < a.width(); ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
                const auto sy = clamp_index(static_cast<std::ptrdiff_t>(y) + dy, a.height());
                for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
                    acc += a(clamp_index(static_cast<std::ptrdiff_t>(x) + dx, a.width()), sy);
                }
            }
            out(x, y) = acc * norm;
        }
    }
    return out;
}

QualityReport quality_report(const RealGrid2D& estimate, const RealGrid2D& reference, double peak,
                             std::size_t median_size) {
    QualityReport r;
    r.mse = mse(estimate, reference);
    r.psnr_db = psnr_from_mse(r.mse, peak);
    r.ssim = ssim(reference, estimate, peak);
    r.ssim_after_median = ssim(reference, median_filter(estimate, median_size), peak);
    return r;
}

std::string to_json(const QualityReport& report) {
    nlohmann::ordered_json j;
    j["mse"] = report.mse;
    if (std::isinf(report.psnr_db)) {
        j["psnr_db"] = "inf";
    } else {
        j["psnr_db"] = report.psnr_db;
    }
    j["ssim"] = report.ssim;
    j["ssim_after_median"] = report.ssim_after_median;
    return j.dump(2);
}

QualityReport quality_report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        QualityReport r;
        r.mse = j.at("mse").get<double>();
        const auto& p = j.at("psnr_db");
        r.psnr_db = p.is_string() ? std::numeric_limits<double>::infinity() : p.get<double>();
        r.ssim = j.at("ssim").get<double>();
        r.ssim_after_median = j.at("ssim_after_median").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed quality report: ") + e.what());
    }
}

double focus_metric(const RealGrid2D& a) {
    const std::size_t n = (a.width() - 1) * (a.height() - 1);
    std::vector<double> mags;
    mags.reserve(n);
    for (std::size_t y = 0; y + 1 < a.height(); ++y) {
        for (std::size_t x = 0; x + 1 < a.width(); ++x) {
            mags.push_back(std::hypot(a(x + 1, y) - a(x, y), a(x, y + 1) - a(x, y)));
        }
    }
    double m = 0.0;
    for (double v : mags) m += v;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double v : mags) var += (v - m) * (v - m);
    return var / static_cast<double>(n);
}

AutofocusResult autofocus(const RealGrid2D& hologram, const OpticalConfig& config, double z_min, double z_max,
                          double z_step) {
    if (!(z_step > 0.0)) throw ConfigError("autofocus step must be positive");
    if (!(z_min < z_max)) throw ConfigError("autofocus range is empty");
    require_same_shape(config.geometry(), hologram.geometry(), "autofocus");

    AutofocusResult result;
    const auto count = static_cast<std::size_t>(std::floor((z_max - z_min) / z_step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) result.candidates.push_back(z_min + static_cast<double>(i) * z_step);
    result.scores.resize(count);

    const ComplexGrid2D field = to_complex(hologram);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const SlicePropagator prop(config.geometry(), config.wavelength, result.candidates[i], config.padding,
                                   config.reference_phased);
        result.scores[i] = focus_metric(abs(prop.backpropagate(field)));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < count; ++i) {
        if (result.scores[i] > result.scores[best]) best = i;
    }
    result.z = result.candidates[best];
    result.score = result.scores[best];
    result.low_confidence = best == 0 || best + 1 == count;
    if (result.low_confidence) {
        warn("autofocus maximum lies on the boundary of the search range; the focus is probably outside it");
    }
    return result;
}

ResolutionLimits resolution_limits(double wavelength, double numerical_aperture) {
    if (!(wavelength > 0.0)) throw ConfigError("wavelength must be positive");
    if (!(numerical_aperture > 0.0 && numerical_aperture <= 1.0)) {
        throw ConfigError("numerical aperture must lie in (0, 1]");
    }
    return {wavelength / (2.0 * numerical_aperture), 2.0 * wavelength / (numerical_aperture * numerical_aperture)};
}

} // namespace emholo
