#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "swarmhydro/config.hpp"

namespace swarmhydro {

enum class ThresholdAction { Classify, Bound };

struct RunOptions {
  std::filesystem::path out_dir = "out";
  // Adds wall_time to the summary; off by default so outputs are byte-stable.
  bool timing = false;
  ThresholdAction threshold_action = ThresholdAction::Classify;
};

struct RunOutcome {
  int exit_code = 0;  // 0 reached the end, 2 blow-up detected
  std::string json;   // content of the main JSON artifact
  std::filesystem::path artifact;
};

/// Precedence: explicit flag, then SWARMHYDRO_OUT, then the config's "out", then "out".
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const ExperimentConfig& config);

/// Dispatches on config.kind and writes all artifacts under options.out_dir.
/// Errors propagate as exceptions.
RunOutcome run(const ExperimentConfig& config, const RunOptions& options);

/// {"error": {"code": ..., "message": ...}}
std::string error_json(const std::exception& error);

}  // namespace swarmhydro
