#include "emholo/run.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emholo/image_io.hpp"
#include "emholo/log.hpp"
#include "emholo/metrics.hpp"
#include "emholo/phantoms.hpp"

namespace emholo {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    fs::path path(const std::string& name) {
        files_.emplace_back(name);
        return dir_ / name;
    }

    void text(const std::string& name, const std::string& content) {
        std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + (dir_ / name).string());
        out << content;
        if (!out) throw IoError("write failed for " + (dir_ / name).string());
    }

    void image(const std::string& name, const RealGrid2D& grid, double wavelength) {
        save_pfm(path(name), grid, meta_for(grid.geometry(), wavelength));
        files_.emplace_back(name + ".meta");
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<fs::path>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
};

std::string slice_name(std::size_t i, const char* what) {
    return "slice" + std::to_string(i) + "_" + what + ".pfm";
}

RealGrid2D load_checked(const fs::path& path, const OpticalConfig& optics) {
    LoadedImage img = load_image(path);
    if (img.has_sidecar && (std::abs(img.meta.pitch_x - optics.pitch) > 1e-9 * optics.pitch ||
                            std::abs(img.meta.wavelength - optics.wavelength) > 1e-9 * optics.wavelength)) {
        warn(path.string() + ": sidecar pitch or wavelength differs from the run configuration; using the configuration");
    }
    return RealGrid2D(Geometry{img.grid.width(), img.grid.height(), optics.pitch, optics.pitch},
                      std::move(img.grid.storage()));
}

std::vector<RealGrid2D> load_stack(const std::vector<fs::path>& paths, const OpticalConfig& optics) {
    std::vector<RealGrid2D> out;
    for (const auto& p : paths) {
        out.push_back(load_checked(p, optics));
        require_same_shape(out.front().geometry(), out.back().geometry(), p.c_str());
    }
    return out;
}

OpticalConfig optics_for(const RunConfig& c, const RealGrid2D& image) {
    OpticalConfig o = c.optics;
    o.width = image.width();
    o.height = image.height();
    o.validate();
    return o;
}

std::string trace_csv(const ReconTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

// Ground-truth object slices (o, not scaled) from the configured paths.
std::optional<ObjectStack> load_truth(const RunConfig& c, const OpticalConfig& optics, bool complex_mode) {
    if (c.ground_truth.empty()) return std::nullopt;
    const auto re = load_stack(c.ground_truth, optics);
    if (re.size() != optics.slice_count()) {
        throw ConfigError("ground_truth lists " + std::to_string(re.size()) + " slices but slice_distances has " +
                          std::to_string(optics.slice_count()));
    }
    if (!complex_mode || c.ground_truth_imag.empty()) return ObjectStack::from_real(re);
    const auto im = load_stack(c.ground_truth_imag, optics);
    if (im.size() != re.size()) throw ConfigError("ground_truth_imag must list as many slices as ground_truth");
    std::vector<ComplexGrid2D> s;
    for (std::size_t i = 0; i < re.size(); ++i) s.push_back(to_complex(re[i], im[i]));
    return ObjectStack(std::move(s), false);
}

double peak_of(const RealGrid2D& g) {
    double p = 0.0;
    for (double v : g) p = std::max(p, std::abs(v));
    return p > 0.0 ? p : 1.0;
}

json report_json(const QualityReport& r) { return json::parse(to_json(r)); }

void write_quality(OutputSet& out, const RunConfig& c, const std::vector<RealGrid2D>& estimate,
                   const std::vector<RealGrid2D>& truth, const char* part) {
    json slices = json::array();
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double peak = c.peak.value_or(peak_of(truth[i]));
        slices.push_back(report_json(quality_report(estimate[i], truth[i], peak, c.median_size)));
    }
    out.text(std::string("quality_") + part + ".json", slices.dump(2) + "\n");
}

void simulate(const RunConfig& c, OutputSet& out, KeyValueDocument& result) {
    ObjectStack stack;
    OpticalConfig optics = c.optics;
    if (!c.object.empty()) {
        const auto re = load_stack(c.object, c.optics);
        optics.width = re.front().width();
        optics.height = re.front().height();
        if (c.object_imag.empty()) {
            stack = ObjectStack::from_real(re);
        } else {
            const auto im = load_stack(c.object_imag, c.optics);
            if (im.size() != re.size()) throw ConfigError("object_imag must list as many slices as object");
            std::vector<ComplexGrid2D> s;
            for (std::size_t i = 0; i < re.size(); ++i) {
                require_same_shape(re[i].geometry(), im[i].geometry(), "object_imag");
                s.push_back(to_complex(re[i], im[i]));
            }
            stack = ObjectStack(std::move(s), false);
        }
    } else {
        stack = phantoms::by_name(c.phantom, optics.geometry(), optics.slice_count());
        if (c.phantom_amplitude) {
            const double k = *c.phantom_amplitude / 0.1;
            std::vector<ComplexGrid2D> s = stack.slices();
            for (auto& g : s) {
                for (auto& v : g) v *= k;
            }
            stack = ObjectStack(std::move(s), stack.real_only());
        }
    }
    if (stack.size() != optics.slice_count()) {
        throw ConfigError("object has " + std::to_string(stack.size()) + " slices but slice_distances has " +
                          std::to_string(optics.slice_count()));
    }
    optics.validate();

    SynthesisReport report;
    RealGrid2D holo = c.full_intensity ? synthesize_full(stack, optics) : synthesize_linear(stack, optics, &report);
    result.set("result.clamped_pixels", std::to_string(report.clamped_pixels));
    // Object-free exposure, usable as reference_illumination for the upper bound.
    const double a = optics.illumination_amplitude;
    RealGrid2D reference(optics.geometry(), a * a);
    if (c.noise) {
        const double scale = c.photon_scale.value_or(photon_scale_for_mean_counts(holo, c.photon_counts));
        holo = add_poisson_noise(holo, scale, c.seed);
        reference = add_poisson_noise(reference, scale, c.seed + 1);
        result.set("result.photon_scale", format_double(scale));
    }
    out.image("hologram.pfm", holo, optics.wavelength);
    out.image("reference.pfm", reference, optics.wavelength);
    for (std::size_t i = 0; i < stack.size(); ++i) {
        out.image(slice_name(i, "truth_re"), real_part(stack[i]), optics.wavelength);
        if (!stack.real_only()) out.image(slice_name(i, "truth_im"), imag_part(stack[i]), optics.wavelength);
    }
}

void reconstruct(const RunConfig& c, OutputSet& out, KeyValueDocument& result) {
    if (!c.hologram) throw ConfigError("mode " + to_string(c.mode) + " needs a hologram path");
    RealGrid2D g = load_checked(*c.hologram, c.optics);
    const OpticalConfig optics = optics_for(c, g);
    const bool complex_mode = c.mode == RunMode::ReconstructComplex;
    const bool baseline = c.mode == RunMode::Baseline;

    if (c.subtract_mean) {
        if (!baseline) throw ConfigError("subtract_mean applies to the baseline only; EM needs non-negative counts");
        const double m = mean(g);
        for (auto& v : g) v -= m;
    }

    const auto truth = load_truth(c, optics, complex_mode);
    std::optional<QualityReference> reference;
    if (truth) reference = QualityReference{truth->slices()};

    ReconResult r;
    if (baseline) {
        double step = 0.0;
        r = baseline_reconstruct(g, optics, c.baseline, reference ? &*reference : nullptr, &step);
        result.set("result.step_size", format_double(step));
    } else {
        ReconParams params = c.recon;
        if (c.reference_illumination) {
            if (complex_mode) throw ConfigError("the upper bound is not defined for complex reconstruction");
            const RealGrid2D raw = load_checked(*c.reference_illumination, optics);
            require_same_shape(g.geometry(), raw.geometry(), "reference_illumination");
            params.upper_bound = apply_reference_illumination(raw, c.reference_filter);
        }
        r = complex_mode ? reconstruct_complex(g, optics, params, reference ? &*reference : nullptr)
                         : reconstruct_real(g, optics, params, reference ? &*reference : nullptr);
    }
    result.set("result.tau", format_double(r.resolved.tau));
    result.set("result.ratio_floor", format_double(r.resolved.ratio_floor));
    result.set("result.iterations", std::to_string(r.trace.records.size()));
    result.set("result.halted", r.trace.halted ? "true" : "false");
    if (!r.trace.diagnostic.empty()) result.set("result.diagnostic", r.trace.diagnostic);

    const HologramOperator op(optics);
    std::vector<RealGrid2D> obj_re;
    std::vector<RealGrid2D> obj_im;
    for (std::size_t i = 0; i < r.estimate.size(); ++i) {
        const ComplexGrid2D& f = r.estimate[i];
        const ComplexGrid2D o = object_from_scaled(f, i, op);
        out.image(slice_name(i, "amplitude"), abs(f), optics.wavelength);
        if (complex_mode) out.image(slice_name(i, "phase"), arg(f), optics.wavelength);
        obj_re.push_back(real_part(o));
        out.image(slice_name(i, "object_re"), obj_re.back(), optics.wavelength);
        if (complex_mode) {
            obj_im.push_back(imag_part(o));
            out.image(slice_name(i, "object_im"), obj_im.back(), optics.wavelength);
        }
    }
    out.text("trace.csv", trace_csv(r.trace));
    if (truth) {
        write_quality(out, c, obj_re, truth->real_parts(), "re");
        if (complex_mode && !truth->real_only()) write_quality(out, c, obj_im, truth->imag_parts(), "im");
    }
    if (r.trace.halted) throw NumericError("reconstruction halted: " + r.trace.diagnostic);
}

void run_autofocus(const RunConfig& c, OutputSet& out, KeyValueDocument& result) {
    if (!c.hologram) throw ConfigError("autofocus needs a hologram path");
    const RealGrid2D g = load_checked(*c.hologram, c.optics);
    const AutofocusResult a = autofocus(g, optics_for(c, g), c.z_min, c.z_max, c.z_step);
    result.set("result.z", format_double(a.z));
    json j;
    j["z"] = a.z;
    j["score"] = a.score;
    j["low_confidence"] = a.low_confidence;
    j["candidates"] = a.candidates;
    j["scores"] = a.scores;
    out.text("autofocus.json", j.dump(2) + "\n");
}

void run_metrics(const RunConfig& c, OutputSet& out) {
    if (!c.estimate || !c.reference) throw ConfigError("metrics needs estimate and reference paths");
    const RealGrid2D est = load_image(*c.estimate).grid;
    const RealGrid2D ref = load_image(*c.reference).grid;
    require_same_shape(est.geometry(), ref.geometry(), "metrics");
    const QualityReport r = quality_report(est, ref, c.peak.value_or(peak_of(ref)), c.median_size);
    out.text("quality.json", to_json(r) + "\n");
}

void run_resolution(const RunConfig& c, OutputSet& out) {
    const ResolutionLimits r = resolution_limits(c.optics.wavelength, c.numerical_aperture);
    json j;
    j["wavelength"] = c.optics.wavelength;
    j["numerical_aperture"] = c.numerical_aperture;
    j["lateral"] = r.lateral;
    j["axial"] = r.axial;
    out.text("resolution.json", j.dump(2) + "\n");
}

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace

RealGrid2D apply_reference_illumination(const RealGrid2D& raw, std::size_t k) {
    return mean_filter(raw, k);
}

RunResult run(const RunConfig& config) {
    RunResult res;
    OutputSet out(config.output_dir);
    KeyValueDocument manifest = config.to_document();
    KeyValueDocument result;
    try {
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec || !fs::is_directory(config.output_dir)) {
            throw IoError("cannot create output directory " + config.output_dir.string());
        }
        switch (config.mode) {
        case RunMode::Simulate: simulate(config, out, result); break;
        case RunMode::ReconstructReal:
        case RunMode::ReconstructComplex:
        case RunMode::Baseline: reconstruct(config, out, result); break;
        case RunMode::Autofocus: run_autofocus(config, out, result); break;
        case RunMode::Metrics: run_metrics(config, out); break;
        case RunMode::Resolution: run_resolution(config, out); break;
        }
    } catch (const Error& e) {
        res.exit_code = static_cast<int>(e.kind());
        res.message = e.what();
        result.set("result.error", kind_name(e.kind()));
    } catch (const std::exception& e) {
        res.exit_code = static_cast<int>(ErrorKind::Numeric);
        res.message = e.what();
        result.set("result.error", "internal");
    }

    if (res.exit_code != 0) {
        json j;
        j["exit_code"] = res.exit_code;
        j["kind"] = result.get("result.error").value_or("internal");
        j["message"] = res.message;
        try {
            out.text("error.json", j.dump(2) + "\n");
        } catch (const Error&) {
            // The output directory itself is unusable; the caller still gets the message.
            return res;
        }
    }
    manifest.set("result.exit_code", std::to_string(res.exit_code));
    manifest.merge(result);
    for (std::size_t i = 0; i < out.files().size(); ++i) {
        manifest.set("result.output." + std::to_string(i), out.files()[i].string());
    }
    try {
        std::ofstream mf(out.dir() / "manifest.txt", std::ios::binary | std::ios::trunc);
        if (!mf) throw IoError("cannot write manifest");
        mf << "# emholo run manifest; feed back with --config to reproduce\n" << manifest.str();
        if (!mf) throw IoError("cannot write manifest");
    } catch (const IoError& e) {
        if (res.exit_code == 0) {
            res.exit_code = static_cast<int>(ErrorKind::Io);
            res.message = e.what();
        }
    }
    res.outputs = out.files();
    res.outputs.emplace_back("manifest.txt");
    return res;
}

} // namespace emholo
