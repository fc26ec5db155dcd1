#pragma once

#include <string>
#include <vector>

#include "swarmhydro/config.hpp"

namespace swarmhydro {

struct PresetInfo {
  std::string name;
  std::string description;
};

const std::vector<PresetInfo>& preset_catalog();

/// Throws ValidationError for an unknown name.
ExperimentConfig preset(const std::string& name);

}  // namespace swarmhydro
