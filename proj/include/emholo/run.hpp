#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emholo/run_config.hpp"

namespace emholo {

/// 5x5 (or k x k) mean filter with replicate boundary; the result is the
/// per-pixel upper bound UB(x) for the reconstruction.
RealGrid2D apply_reference_illumination(const RealGrid2D& raw, std::size_t k = 5);

struct RunResult {
    int exit_code = 0;
    /// Files written, relative to the output directory, in write order.
    std::vector<std::filesystem::path> outputs;
    std::string message;
};

/// Executes the pipeline selected by `config.mode` and writes its outputs plus
/// `manifest.txt` into `config.output_dir`. Errors are caught and mapped to
/// exit codes 2 (config), 3 (numeric) and 4 (I/O); the details go to
/// `error.json`, which the manifest then lists.
RunResult run(const RunConfig& config);

} // namespace emholo
