#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <map>
#include <sstream>

#include "emholo/baseline_ist.hpp"
#include "emholo/log.hpp"
#include "emholo/metrics.hpp"
#include "emholo/phantoms.hpp"
#include "emholo/propagation.hpp"
#include "emholo/recon_em.hpp"
#include "emholo/run.hpp"
#include "emholo/run_config.hpp"

namespace py = pybind11;
using namespace emholo;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<complex_t, py::array::c_style | py::array::forcecast>;

template <class T>
Grid2D<T> to_grid(const py::array_t<T, py::array::c_style | py::array::forcecast>& a, double pitch) {
    if (a.ndim() != 2) throw ConfigError("expected a 2-D array, got " + std::to_string(a.ndim()) + " dimensions");
    const Geometry g{static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)), pitch, pitch};
    g.validate();
    return Grid2D<T>(g, std::vector<T>(a.data(), a.data() + a.size()));
}

template <class T>
py::array_t<T> to_array(const Grid2D<T>& g) {
    py::array_t<T> out({g.height(), g.width()});
    std::copy(g.begin(), g.end(), out.mutable_data());
    return out;
}

template <class T>
py::list to_list(const std::vector<Grid2D<T>>& grids) {
    py::list out;
    for (const auto& g : grids) out.append(to_array(g));
    return out;
}

bool is_complex(const py::handle& h) {
    return py::isinstance<py::array>(h) && py::array::ensure(h).dtype().kind() == 'c';
}

ObjectStack to_stack(const py::sequence& slices, double pitch) {
    std::vector<ComplexGrid2D> out;
    bool real_only = true;
    for (const auto& s : slices) {
        if (is_complex(s)) {
            real_only = false;
            out.push_back(to_grid(s.cast<ComplexArray>(), pitch));
        } else {
            out.push_back(to_complex(to_grid(s.cast<RealArray>(), pitch)));
        }
    }
    if (out.empty()) throw ConfigError("object stack needs at least one slice");
    return ObjectStack(std::move(out), real_only);
}

const QualityReference* reference_from(const std::optional<py::sequence>& truth, double pitch,
                                       QualityReference& storage) {
    if (!truth) return nullptr;
    storage.slices = to_stack(*truth, pitch).slices();
    return &storage;
}

py::dict trace_dict(const ReconTrace& t) {
    py::list records;
    for (const auto& r : t.records) {
        py::dict d;
        d["iteration"] = r.iteration;
        d["nll"] = r.nll;
        d["tv"] = r.tv;
        d["ssim"] = r.ssim ? py::object(py::float_(*r.ssim)) : py::object(py::none());
        d["residual"] = r.residual;
        d["millis"] = r.millis;
        records.append(d);
    }
    py::dict out;
    out["records"] = records;
    out["halted"] = t.halted;
    out["diagnostic"] = t.diagnostic;
    return out;
}

py::dict result_dict(const ReconResult& r, const OpticalConfig& config, bool complex_mode) {
    const HologramOperator op(config);
    py::list scaled;
    py::list objects;
    for (std::size_t z = 0; z < r.estimate.size(); ++z) {
        const auto o = object_from_scaled(r.estimate[z], z, op);
        if (complex_mode) {
            scaled.append(to_array(r.estimate[z]));
            objects.append(to_array(o));
        } else {
            scaled.append(to_array(real_part(r.estimate[z])));
            objects.append(to_array(real_part(o)));
        }
    }
    py::dict out;
    out["scaled"] = scaled;
    out["objects"] = objects;
    out["trace"] = trace_dict(r.trace);
    out["tau"] = r.resolved.tau;
    out["ratio_floor"] = r.resolved.ratio_floor;
    out["tv_epsilon"] = r.resolved.tv_epsilon ? py::object(py::float_(*r.resolved.tv_epsilon)) : py::none();
    return out;
}

ReconParams recon_params(int max_iters, std::optional<double> tau, double beta, std::optional<RealArray> upper_bound,
                         std::optional<double> tv_epsilon, const std::string& init, const OpticalConfig& config) {
    ReconParams p;
    p.max_iters = max_iters;
    p.tau = tau;
    p.beta = beta;
    p.tv_epsilon = tv_epsilon;
    if (init == "backprop") {
        p.init_mode = InitMode::Backpropagation;
    } else if (init == "constant") {
        p.init_mode = InitMode::Constant;
    } else {
        throw ConfigError("init must be 'backprop' or 'constant'");
    }
    if (upper_bound) p.upper_bound = to_grid(*upper_bound, config.pitch);
    return p;
}

} // namespace

PYBIND11_MODULE(_emholo, m) {
    m.doc() = "Multiplicative EM reconstruction for lensless in-line holography";

    static py::exception<Error> base_error(m, "Error", PyExc_RuntimeError);
    static py::exception<ConfigError> config_error(m, "ConfigError", base_error.ptr());
    static py::exception<NumericError> numeric_error(m, "NumericError", base_error.ptr());
    static py::exception<IoError> io_error(m, "IoError", base_error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const NumericError& e) {
            py::set_error(numeric_error, e.what());
        } catch (const IoError& e) {
            py::set_error(io_error, e.what());
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });

    py::enum_<Padding>(m, "Padding").value("NONE", Padding::None).value("ZERO", Padding::Zero);

    py::class_<OpticalConfig>(m, "OpticalConfig")
        .def(py::init([](std::size_t width, std::size_t height, std::vector<double> slice_distances, double wavelength,
                         double pitch, Padding padding, bool reference_phased, double illumination_amplitude) {
                 OpticalConfig c;
                 c.width = width;
                 c.height = height;
                 c.slice_distances = std::move(slice_distances);
                 c.wavelength = wavelength;
                 c.pitch = pitch;
                 c.padding = padding;
                 c.reference_phased = reference_phased;
                 c.illumination_amplitude = illumination_amplitude;
                 c.validate();
                 return c;
             }),
             py::arg("width") = 512, py::arg("height") = 512, py::arg("slice_distances") = std::vector<double>{1e-3},
             py::arg("wavelength") = 675e-9, py::arg("pitch") = 1.12e-6, py::arg("padding") = Padding::Zero,
             py::arg("reference_phased") = true, py::arg("illumination_amplitude") = 1.0)
        .def_readwrite("width", &OpticalConfig::width)
        .def_readwrite("height", &OpticalConfig::height)
        .def_readwrite("slice_distances", &OpticalConfig::slice_distances)
        .def_readwrite("wavelength", &OpticalConfig::wavelength)
        .def_readwrite("pitch", &OpticalConfig::pitch)
        .def_readwrite("padding", &OpticalConfig::padding)
        .def_readwrite("reference_phased", &OpticalConfig::reference_phased)
        .def_readwrite("illumination_amplitude", &OpticalConfig::illumination_amplitude)
        .def("validate", &OpticalConfig::validate)
        .def("__repr__", [](const OpticalConfig& c) {
            std::ostringstream os;
            os << "OpticalConfig(width=" << c.width << ", height=" << c.height << ", slices=" << c.slice_count()
               << ")";
            return os.str();
        });

    m.def(
        "propagate",
        [](const ComplexArray& field, double z, double wavelength, double pitch) {
            return to_array(propagate(to_grid(field, pitch), z, wavelength));
        },
        py::arg("field"), py::arg("z"), py::arg("wavelength") = 675e-9, py::arg("pitch") = 1.12e-6,
        "Angular-spectrum propagation of a complex field over distance z (meters).");

    m.def(
        "kernel_sums",
        [](double wavelength, double z) {
            const auto k = kernel_sums(wavelength, z);
            return complex_t(k.re, k.im);
        },
        py::arg("wavelength"), py::arg("z"));

    m.def(
        "simulate",
        [](const py::sequence& slices, const OpticalConfig& config, bool full) {
            const auto stack = to_stack(slices, config.pitch);
            return to_array(full ? synthesize_full(stack, config) : synthesize_linear(stack, config));
        },
        py::arg("slices"), py::arg("config"), py::arg("full") = false,
        "Hologram intensity of an object stack; real arrays are real slices, complex arrays carry phase.");

    m.def(
        "add_poisson_noise",
        [](const RealArray& intensity, double photon_scale, std::uint64_t seed) {
            return to_array(add_poisson_noise(to_grid(intensity, 1.0), photon_scale, seed));
        },
        py::arg("intensity"), py::arg("photon_scale"), py::arg("seed"));

    m.def(
        "photon_scale_for_mean_counts",
        [](const RealArray& intensity, double counts) {
            return photon_scale_for_mean_counts(to_grid(intensity, 1.0), counts);
        },
        py::arg("intensity"), py::arg("counts") = 1e4);

    m.def(
        "backpropagate",
        [](const RealArray& hologram, const OpticalConfig& config) {
            return to_list(backpropagate(to_grid(hologram, config.pitch), HologramOperator(config)));
        },
        py::arg("hologram"), py::arg("config"));

    m.def(
        "reference_upper_bound",
        [](const RealArray& reference, std::size_t k) {
            return to_array(apply_reference_illumination(to_grid(reference, 1.0), k));
        },
        py::arg("reference"), py::arg("filter_size") = 5,
        "Upper bound derived from a reference (object-free) illumination image.");

    m.def(
        "reconstruct_real",
        [](const RealArray& hologram, const OpticalConfig& config, int max_iters, std::optional<double> tau,
           double beta, std::optional<RealArray> upper_bound, std::optional<double> tv_epsilon,
           const std::string& init, std::optional<py::sequence> truth) {
            const auto p = recon_params(max_iters, tau, beta, upper_bound, tv_epsilon, init, config);
            QualityReference ref;
            const auto* rp = reference_from(truth, config.pitch, ref);
            const auto g = to_grid(hologram, config.pitch);
            ReconResult r;
            {
                py::gil_scoped_release release;
                r = reconstruct_real(g, config, p, rp);
            }
            return result_dict(r, config, false);
        },
        py::arg("hologram"), py::arg("config"), py::arg("max_iters") = 100, py::arg("tau") = py::none(),
        py::arg("beta") = 0.5, py::arg("upper_bound") = py::none(), py::arg("tv_epsilon") = py::none(),
        py::arg("init") = "backprop", py::arg("truth") = py::none());

    m.def(
        "reconstruct_complex",
        [](const RealArray& hologram, const OpticalConfig& config, int max_iters, std::optional<double> tau,
           double beta, std::optional<RealArray> upper_bound, std::optional<double> tv_epsilon,
           const std::string& init, std::optional<py::sequence> truth) {
            const auto p = recon_params(max_iters, tau, beta, upper_bound, tv_epsilon, init, config);
            QualityReference ref;
            const auto* rp = reference_from(truth, config.pitch, ref);
            const auto g = to_grid(hologram, config.pitch);
            ReconResult r;
            {
                py::gil_scoped_release release;
                r = reconstruct_complex(g, config, p, rp);
            }
            return result_dict(r, config, true);
        },
        py::arg("hologram"), py::arg("config"), py::arg("max_iters") = 100, py::arg("tau") = py::none(),
        py::arg("beta") = 0.5, py::arg("upper_bound") = py::none(), py::arg("tv_epsilon") = py::none(),
        py::arg("init") = "backprop", py::arg("truth") = py::none());

    m.def(
        "baseline_reconstruct",
        [](const RealArray& hologram, const OpticalConfig& config, int max_iters, std::optional<double> tau,
           std::optional<double> step_size, std::optional<py::sequence> truth) {
            BaselineParams p;
            p.max_iters = max_iters;
            p.tau = tau;
            p.step_size = step_size;
            QualityReference ref;
            const auto* rp = reference_from(truth, config.pitch, ref);
            const auto g = to_grid(hologram, config.pitch);
            ReconResult r;
            double used = 0.0;
            {
                py::gil_scoped_release release;
                r = baseline_reconstruct(g, config, p, rp, &used);
            }
            auto out = result_dict(r, config, false);
            out["step_size"] = used;
            return out;
        },
        py::arg("hologram"), py::arg("config"), py::arg("max_iters") = 100, py::arg("tau") = py::none(),
        py::arg("step_size") = py::none(), py::arg("truth") = py::none(),
        "Iterative shrinkage-thresholding comparator on the least-squares objective.");

    m.def(
        "mse", [](const RealArray& a, const RealArray& b) { return mse(to_grid(a, 1.0), to_grid(b, 1.0)); },
        py::arg("a"), py::arg("b"));
    m.def(
        "psnr",
        [](const RealArray& a, const RealArray& b, double peak) { return psnr(to_grid(a, 1.0), to_grid(b, 1.0), peak); },
        py::arg("a"), py::arg("b"), py::arg("peak"));
    m.def("psnr_from_mse", &psnr_from_mse, py::arg("mse"), py::arg("peak"));
    m.def(
        "ssim",
        [](const RealArray& a, const RealArray& b, std::optional<double> data_range) {
            return ssim(to_grid(a, 1.0), to_grid(b, 1.0), data_range);
        },
        py::arg("a"), py::arg("b"), py::arg("data_range") = py::none());
    m.def(
        "median_filter", [](const RealArray& a, std::size_t k) { return to_array(median_filter(to_grid(a, 1.0), k)); },
        py::arg("a"), py::arg("size") = 3);
    m.def(
        "quality_report",
        [](const RealArray& estimate, const RealArray& reference, double peak, std::size_t median_size) {
            const auto r = quality_report(to_grid(estimate, 1.0), to_grid(reference, 1.0), peak, median_size);
            py::dict d;
            d["mse"] = r.mse;
            d["psnr_db"] = r.psnr_db;
            d["ssim"] = r.ssim;
            d["ssim_after_median"] = r.ssim_after_median;
            return d;
        },
        py::arg("estimate"), py::arg("reference"), py::arg("peak"), py::arg("median_size") = 3);
    m.def(
        "focus_metric", [](const RealArray& a) { return focus_metric(to_grid(a, 1.0)); }, py::arg("a"));
    m.def(
        "autofocus",
        [](const RealArray& hologram, const OpticalConfig& config, double z_min, double z_max, double z_step) {
            const auto g = to_grid(hologram, config.pitch);
            AutofocusResult r;
            {
                py::gil_scoped_release release;
                r = autofocus(g, config, z_min, z_max, z_step);
            }
            py::dict d;
            d["z"] = r.z;
            d["score"] = r.score;
            d["low_confidence"] = r.low_confidence;
            d["candidates"] = r.candidates;
            d["scores"] = r.scores;
            return d;
        },
        py::arg("hologram"), py::arg("config"), py::arg("z_min") = 0.5e-3, py::arg("z_max") = 1.5e-3,
        py::arg("z_step") = 10e-6);
    m.def(
        "resolution_limits",
        [](double wavelength, double na) {
            const auto r = resolution_limits(wavelength, na);
            return py::make_tuple(r.lateral, r.axial);
        },
        py::arg("wavelength"), py::arg("numerical_aperture"), "Returns (lateral, axial) in meters.");

    m.def(
        "phantom",
        [](const std::string& name, std::size_t width, std::size_t height, std::size_t slices, double pitch) {
            const auto stack = phantoms::by_name(name, Geometry{width, height, pitch, pitch}, slices);
            py::list out;
            for (const auto& s : stack.slices()) {
                if (stack.real_only()) {
                    out.append(to_array(real_part(s)));
                } else {
                    out.append(to_array(s));
                }
            }
            return out;
        },
        py::arg("name") = "sparse3", py::arg("width") = 512, py::arg("height") = 512, py::arg("slices") = 3,
        py::arg("pitch") = 1.12e-6);

    m.def("config_keys", &config_keys);
    m.def(
        "run",
        [](const std::map<std::string, std::string>& settings) {
            KeyValueDocument doc;
            for (const auto& [k, v] : settings) doc.set(k, v);
            const auto config = RunConfig::from_document(doc);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run(config);
            }
            py::dict d;
            d["exit_code"] = r.exit_code;
            d["outputs"] = r.outputs;
            d["message"] = r.message;
            return d;
        },
        py::arg("settings"), "Runs one CLI-equivalent job from string settings; returns exit code and outputs.");

    m.def(
        "set_quiet",
        [](bool quiet) {
            if (quiet) {
                set_warning_sink([](std::string_view) {});
            } else {
                set_warning_sink([](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; });
            }
        },
        py::arg("quiet") = true);
}
