#pragma once

// Experiment runner: executes a validated config, writes CSV/JSON results,
// a run manifest, and (optionally) a plotting script that reads only the
// emitted CSV files.  Exit codes: 0 success, 1 validation error, 2 runtime
// failure.

#include "rcm/config.hpp"

namespace rcm {

inline constexpr const char* kVersion = "rcm-lab 0.1.0";

struct RunReport {
  std::vector<std::string> outputs;  // paths written, relative to out_dir
};

RunReport run_experiment(const ExperimentConfig& config);

}  // namespace rcm
