#pragma once

#include <string>

#include "nanoplate/harness.hpp"

namespace nanoplate {

/// Reads an experiment description in YAML. Relative grid-sample paths are
/// resolved against the directory of the file. Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::string& path);

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& base_dir = ".");

}  // namespace nanoplate
