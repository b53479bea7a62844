// emholo: simulate and reconstruct in-line holograms from the command line.
//
//   emholo simulate --config run.conf --seed 7
//   emholo reconstruct-real --hologram out/hologram.pfm --slice-distances 0.5mm,1mm,1.25mm
//
// Every configuration key is also a flag (underscores become dashes). Flags
// override values read from --config. EMHOLO_NUM_THREADS caps OpenMP threads.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "emholo/run.hpp"

namespace {

void apply_thread_env() {
    const char* env = std::getenv("EMHOLO_NUM_THREADS");
    if (env == nullptr || *env == '\0') return;
    const int n = std::atoi(env);
    if (n < 1) throw emholo::ConfigError("EMHOLO_NUM_THREADS must be a positive integer");
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
}

std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

void print_error(int code, const std::string& message) {
    nlohmann::ordered_json j;
    j["exit_code"] = code;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressive in-line holography: simulation, EM reconstruction and metrics"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> overrides;

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"simulate", "Synthesize a hologram from a phantom or object images"},
        {"reconstruct-real", "Multi-depth real-object EM reconstruction"},
        {"reconstruct-complex", "Single-plane complex-object EM reconstruction"},
        {"baseline", "Least-squares shrinkage-thresholding comparator"},
        {"autofocus", "Sweep backpropagation distance and pick the sharpest plane"},
        {"metrics", "MSE, PSNR and SSIM of an estimate against a reference"},
        {"resolution", "Lateral and axial resolution limits for a numerical aperture"}};

    for (const auto& [verb, help] : verbs) {
        CLI::App* sub = app.add_subcommand(verb, help);
        sub->add_option("-c,--config", config_path, "key = value configuration file");
        sub->add_option("--set", sets, "Extra key=value override (repeatable)");
        for (const auto& key : emholo::config_keys()) {
            if (key == "mode") continue;
            sub->add_option_function<std::string>(
                flag_name(key), [&overrides, key](const std::string& v) { overrides[key] = v; },
                "Overrides '" + key + "'");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(emholo::ErrorKind::Config);
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    emholo::RunConfig config;
    try {
        apply_thread_env();
        emholo::KeyValueDocument doc;
        if (!config_path.empty()) doc = emholo::KeyValueDocument::load(config_path);
        for (const auto& s : sets) doc.merge(emholo::KeyValueDocument::parse(s, "--set"));
        for (const auto& [k, v] : overrides) doc.set(k, v);
        doc.set("mode", verb);
        config = emholo::RunConfig::from_document(doc);
    } catch (const emholo::Error& e) {
        print_error(static_cast<int>(e.kind()), e.what());
        return static_cast<int>(e.kind());
    }

    const emholo::RunResult result = emholo::run(config);
    if (result.exit_code != 0) {
        print_error(result.exit_code, result.message);
        return result.exit_code;
    }
    for (const auto& f : result.outputs) std::cout << (config.output_dir / f).string() << "\n";
    return 0;
}
