#include "emholo/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace emholo {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join_paths(const std::vector<std::filesystem::path>& paths) {
    std::string out;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i > 0) out += ",";
        out += paths[i].string();
    }
    return out;
}

std::vector<std::filesystem::path> parse_paths(const std::string& text) {
    std::vector<std::filesystem::path> out;
    for (const auto& s : split(text, ',')) out.emplace_back(s);
    return out;
}

std::size_t parse_size(const std::string& text, const std::string& key) {
    const double v = parse_number(text, key);
    if (v < 0 || v != std::floor(v) || v > 1e9) throw ConfigError(key + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

} // namespace

KeyValueDocument KeyValueDocument::parse(const std::string& text, const std::string& origin) {
    KeyValueDocument doc;
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
        doc.set(key, trim(std::string_view(content).substr(eq + 1)));
    }
    return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void KeyValueDocument::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

std::optional<std::string> KeyValueDocument::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return std::nullopt;
}

void KeyValueDocument::merge(const KeyValueDocument& other) {
    for (const auto& [k, v] : other.entries_) set(k, v);
}

std::string KeyValueDocument::str() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": '" + text + "' is not a number");
    }
    return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(key + ": '" + text + "' is not a boolean");
}

double parse_length(const std::string& text) {
    const std::string t = trim(text);
    static const std::pair<const char*, double> units[] = {
        {"nm", 1e-9}, {"um", 1e-6}, {"\xC2\xB5m", 1e-6}, {"\xCE\xBCm", 1e-6}, {"mm", 1e-3}, {"m", 1.0}};
    for (const auto& [suffix, scale] : units) {
        const std::string s(suffix);
        if (t.size() > s.size() && t.compare(t.size() - s.size(), s.size(), s) == 0) {
            return parse_number(t.substr(0, t.size() - s.size()), "length") * scale;
        }
    }
    return parse_number(t, "length");
}

std::vector<double> parse_length_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_length(item));
    return out;
}

RunMode parse_mode(const std::string& text) {
    const std::string t = trim(text);
    if (t == "simulate") return RunMode::Simulate;
    if (t == "reconstruct-real") return RunMode::ReconstructReal;
    if (t == "reconstruct-complex") return RunMode::ReconstructComplex;
    if (t == "baseline") return RunMode::Baseline;
    if (t == "autofocus") return RunMode::Autofocus;
    if (t == "metrics") return RunMode::Metrics;
    if (t == "resolution") return RunMode::Resolution;
    throw ConfigError("unknown mode '" + text + "'");
}

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Simulate: return "simulate";
    case RunMode::ReconstructReal: return "reconstruct-real";
    case RunMode::ReconstructComplex: return "reconstruct-complex";
    case RunMode::Baseline: return "baseline";
    case RunMode::Autofocus: return "autofocus";
    case RunMode::Metrics: return "metrics";
    case RunMode::Resolution: return "resolution";
    }
    return "unknown";
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "mode", "wavelength", "pitch", "width", "height", "illumination_amplitude", "slice_distances", "padding",
        "reference_phased", "max_iters", "tau", "beta", "tv_epsilon", "ratio_floor", "init_mode",
        "init_floor_fraction", "stop_rule", "stop_delta", "divergence_patience", "trace_timing", "step_size",
        "power_iterations", "output_dir", "hologram", "reference_illumination", "ground_truth",
        "ground_truth_imag", "phantom", "phantom_amplitude", "object", "object_imag", "synthesis", "noise",
        "photon_scale", "photon_counts", "seed", "subtract_mean", "reference_filter", "z_min", "z_max", "z_step",
        "estimate", "reference", "peak", "median_size", "numerical_aperture"};
    return keys;
}

RunConfig RunConfig::from_document(const KeyValueDocument& doc) {
    static const std::set<std::string> known(config_keys().begin(), config_keys().end());

    RunConfig c;
    for (const auto& [key, value] : doc.entries()) {
        if (key.starts_with("result.")) continue; // run outcome lines in a manifest
        if (!known.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
    }
    auto str = [&](const char* key) { return doc.get(key); };
    auto num = [&](const char* key) -> std::optional<double> {
        if (auto v = doc.get(key)) return parse_number(*v, key);
        return std::nullopt;
    };
    auto len = [&](const char* key) -> std::optional<double> {
        if (auto v = doc.get(key)) return parse_length(*v);
        return std::nullopt;
    };
    auto flag = [&](const char* key) -> std::optional<bool> {
        if (auto v = doc.get(key)) return parse_bool(*v, key);
        return std::nullopt;
    };

    if (auto v = str("mode")) c.mode = parse_mode(*v);
    if (auto v = len("wavelength")) c.optics.wavelength = *v;
    if (auto v = len("pitch")) c.optics.pitch = *v;
    if (auto v = str("width")) c.optics.width = parse_size(*v, "width");
    if (auto v = str("height")) c.optics.height = parse_size(*v, "height");
    if (auto v = num("illumination_amplitude")) c.optics.illumination_amplitude = *v;
    if (auto v = str("slice_distances")) c.optics.slice_distances = parse_length_list(*v);
    if (auto v = str("padding")) {
        if (*v == "zero") {
            c.optics.padding = Padding::Zero;
        } else if (*v == "none") {
            c.optics.padding = Padding::None;
        } else {
            throw ConfigError("padding must be 'zero' or 'none'");
        }
    }
    if (auto v = flag("reference_phased")) c.optics.reference_phased = *v;

    if (auto v = str("max_iters")) c.recon.max_iters = c.baseline.max_iters = static_cast<int>(parse_size(*v, "max_iters"));
    if (auto v = num("tau")) c.recon.tau = c.baseline.tau = *v;
    if (auto v = num("beta")) c.recon.beta = *v;
    if (auto v = num("tv_epsilon")) c.recon.tv_epsilon = c.baseline.tv_epsilon = *v;
    if (auto v = num("ratio_floor")) c.recon.ratio_floor = *v;
    if (auto v = str("init_mode")) {
        if (*v == "backpropagation") {
            c.recon.init_mode = InitMode::Backpropagation;
        } else if (*v == "constant") {
            c.recon.init_mode = InitMode::Constant;
        } else {
            throw ConfigError("init_mode must be 'backpropagation' or 'constant'");
        }
    }
    if (auto v = num("init_floor_fraction")) c.recon.init_floor_fraction = *v;
    if (auto v = str("stop_rule")) {
        if (*v == "fixed_iters") {
            c.recon.stop_rule = StopRule::FixedIters;
        } else if (*v == "relative_change") {
            c.recon.stop_rule = StopRule::RelativeChange;
        } else {
            throw ConfigError("stop_rule must be 'fixed_iters' or 'relative_change'");
        }
    }
    if (auto v = num("stop_delta")) c.recon.stop_delta = *v;
    if (auto v = str("divergence_patience")) {
        c.recon.divergence_patience = c.baseline.divergence_patience =
            static_cast<int>(parse_size(*v, "divergence_patience"));
    }
    if (auto v = flag("trace_timing")) c.recon.record_timing = c.baseline.record_timing = *v;
    if (auto v = num("step_size")) c.baseline.step_size = *v;
    if (auto v = str("power_iterations")) c.baseline.power_iterations = static_cast<int>(parse_size(*v, "power_iterations"));

    if (auto v = str("output_dir")) c.output_dir = *v;
    if (auto v = str("hologram")) c.hologram = *v;
    if (auto v = str("reference_illumination")) c.reference_illumination = *v;
    if (auto v = str("ground_truth")) c.ground_truth = parse_paths(*v);
    if (auto v = str("ground_truth_imag")) c.ground_truth_imag = parse_paths(*v);

    if (auto v = str("phantom")) c.phantom = *v;
    if (auto v = num("phantom_amplitude")) c.phantom_amplitude = *v;
    if (auto v = str("object")) c.object = parse_paths(*v);
    if (auto v = str("object_imag")) c.object_imag = parse_paths(*v);
    if (auto v = str("synthesis")) {
        if (*v == "linear") {
            c.full_intensity = false;
        } else if (*v == "full") {
            c.full_intensity = true;
        } else {
            throw ConfigError("synthesis must be 'linear' or 'full'");
        }
    }
    if (auto v = flag("noise")) c.noise = *v;
    if (auto v = num("photon_scale")) c.photon_scale = *v;
    if (auto v = num("photon_counts")) c.photon_counts = *v;
    if (auto v = str("seed")) {
        const std::string t = trim(*v);
        std::uint64_t s = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), s);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError("seed must be an unsigned integer");
        c.seed = s;
    }

    if (auto v = flag("subtract_mean")) c.subtract_mean = *v;
    if (auto v = str("reference_filter")) c.reference_filter = parse_size(*v, "reference_filter");
    if (auto v = len("z_min")) c.z_min = *v;
    if (auto v = len("z_max")) c.z_max = *v;
    if (auto v = len("z_step")) c.z_step = *v;
    if (auto v = str("estimate")) c.estimate = *v;
    if (auto v = str("reference")) c.reference = *v;
    if (auto v = num("peak")) c.peak = *v;
    if (auto v = str("median_size")) c.median_size = parse_size(*v, "median_size");
    if (auto v = num("numerical_aperture")) c.numerical_aperture = *v;
    return c;
}

KeyValueDocument RunConfig::to_document() const {
    KeyValueDocument d;
    d.set("mode", to_string(mode));
    d.set("wavelength", format_double(optics.wavelength));
    d.set("pitch", format_double(optics.pitch));
    d.set("width", std::to_string(optics.width));
    d.set("height", std::to_string(optics.height));
    d.set("illumination_amplitude", format_double(optics.illumination_amplitude));
    std::string zs;
    for (std::size_t i = 0; i < optics.slice_distances.size(); ++i) {
        if (i > 0) zs += ",";
        zs += format_double(optics.slice_distances[i]);
    }
    d.set("slice_distances", zs);
    d.set("padding", optics.padding == Padding::Zero ? "zero" : "none");
    d.set("reference_phased", optics.reference_phased ? "true" : "false");

    d.set("max_iters", std::to_string(recon.max_iters));
    if (recon.tau) d.set("tau", format_double(*recon.tau));
    d.set("beta", format_double(recon.beta));
    if (recon.tv_epsilon) d.set("tv_epsilon", format_double(*recon.tv_epsilon));
    if (recon.ratio_floor) d.set("ratio_floor", format_double(*recon.ratio_floor));
    d.set("init_mode", recon.init_mode == InitMode::Backpropagation ? "backpropagation" : "constant");
    d.set("init_floor_fraction", format_double(recon.init_floor_fraction));
    d.set("stop_rule", recon.stop_rule == StopRule::FixedIters ? "fixed_iters" : "relative_change");
    d.set("stop_delta", format_double(recon.stop_delta));
    d.set("divergence_patience", std::to_string(recon.divergence_patience));
    d.set("trace_timing", recon.record_timing ? "true" : "false");
    if (baseline.step_size) d.set("step_size", format_double(*baseline.step_size));
    d.set("power_iterations", std::to_string(baseline.power_iterations));

    d.set("output_dir", output_dir.string());
    if (hologram) d.set("hologram", hologram->string());
    if (reference_illumination) d.set("reference_illumination", reference_illumination->string());
    if (!ground_truth.empty()) d.set("ground_truth", join_paths(ground_truth));
    if (!ground_truth_imag.empty()) d.set("ground_truth_imag", join_paths(ground_truth_imag));

    d.set("phantom", phantom);
    if (phantom_amplitude) d.set("phantom_amplitude", format_double(*phantom_amplitude));
    if (!object.empty()) d.set("object", join_paths(object));
    if (!object_imag.empty()) d.set("object_imag", join_paths(object_imag));
    d.set("synthesis", full_intensity ? "full" : "linear");
    d.set("noise", noise ? "true" : "false");
    if (photon_scale) d.set("photon_scale", format_double(*photon_scale));
    d.set("photon_counts", format_double(photon_counts));
    d.set("seed", std::to_string(seed));

    d.set("subtract_mean", subtract_mean ? "true" : "false");
    d.set("reference_filter", std::to_string(reference_filter));
    d.set("z_min", format_double(z_min));
    d.set("z_max", format_double(z_max));
    d.set("z_step", format_double(z_step));
    if (estimate) d.set("estimate", estimate->string());
    if (reference) d.set("reference", reference->string());
    if (peak) d.set("peak", format_double(*peak));
    d.set("median_size", std::to_string(median_size));
    d.set("numerical_aperture", format_double(numerical_aperture));
    return d;
}

} // namespace emholo
