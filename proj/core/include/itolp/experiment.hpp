#pragma once

#include "itolp/config.hpp"
#include "itolp/report.hpp"

#include <filesystem>

namespace itolp {

/// Runs every path of the experiment and evaluates its assertions. Output is
/// a function of (config, seed) only; rows are ordered by path index.
Report run_experiment(const ExperimentConfig& cfg);

/// Writes <out_dir>/<id>.csv and <out_dir>/<id>.json.
void write_report(const Report& report, const std::filesystem::path& out_dir);

}  // namespace itolp
