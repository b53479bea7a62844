#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emholo/baseline_ist.hpp"
#include "emholo/forward_model.hpp"
#include "emholo/recon_em.hpp"

namespace emholo {

/// Ordered `key = value` document. Blank lines and text after '#' are ignored;
/// a later assignment to the same key replaces the earlier value in place.
class KeyValueDocument {
public:
    static KeyValueDocument parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueDocument load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& key) const;
    bool contains(const std::string& key) const { return get(key).has_value(); }
    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    /// Overlays every entry of `other` onto this document.
    void merge(const KeyValueDocument& other);

    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Parses a length with an optional unit suffix: m, mm, um (or µm), nm.
/// A bare number is taken as meters.
double parse_length(const std::string& text);

std::vector<double> parse_length_list(const std::string& text);
double parse_number(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);

enum class RunMode { Simulate, ReconstructReal, ReconstructComplex, Baseline, Autofocus, Metrics, Resolution };

RunMode parse_mode(const std::string& text);
std::string to_string(RunMode mode);

/// Every key RunConfig::from_document accepts, in manifest order.
const std::vector<std::string>& config_keys();

/// Everything one CLI invocation needs, flattened from a KeyValueDocument.
struct RunConfig {
    RunMode mode = RunMode::Simulate;
    OpticalConfig optics;
    ReconParams recon;
    BaselineParams baseline;

    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> hologram;
    std::optional<std::filesystem::path> reference_illumination;
    std::vector<std::filesystem::path> ground_truth;
    std::vector<std::filesystem::path> ground_truth_imag;

    // simulate
    std::string phantom = "sparse3";
    std::optional<double> phantom_amplitude;
    std::vector<std::filesystem::path> object;
    std::vector<std::filesystem::path> object_imag;
    bool full_intensity = false;
    bool noise = false;
    std::optional<double> photon_scale;
    double photon_counts = 1e4;
    std::uint64_t seed = 1;

    // reconstruct
    bool subtract_mean = false;
    std::size_t reference_filter = 5;

    // autofocus
    double z_min = 0.5e-3;
    double z_max = 1.5e-3;
    double z_step = 10e-6;

    // metrics
    std::optional<std::filesystem::path> estimate;
    std::optional<std::filesystem::path> reference;
    std::optional<double> peak;
    std::size_t median_size = 3;

    // resolution
    double numerical_aperture = 0.2885;

    static RunConfig from_document(const KeyValueDocument& doc);

    /// Every setting as SI `key = value` lines, in a fixed order.
    KeyValueDocument to_document() const;
};

} // namespace emholo
