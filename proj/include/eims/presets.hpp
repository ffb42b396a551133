#pragma once

#include <string>
#include <vector>

#include "eims/experiment.hpp"

namespace eims {

std::vector<std::string> preset_names();

// Embedded configuration JSON; throws ConfigError for unknown names.
std::string preset_json(const std::string& name);

ExperimentConfig preset_config(const std::string& name);

}  // namespace eims
