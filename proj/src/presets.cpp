#include "eims/presets.hpp"

namespace eims {

namespace {
// Small 2-d benchmark; every rule, exact path sampling throughout.
const char* kDesk = R"({
  "name": "desk",
  "grid": {"d": 2, "levels": 20},
  "kernel": {"family": "se", "lengthscale": 0.2, "output_scale": 1.0},
  "noise_sd": 0.1,
  "rules": ["eims", "pims", "ts", "ucb", "irgp-ucb", "ei", "ei-mumax", "mes", "e3i"],
  "horizon": 100,
  "trials": 16,
  "master_seed": 20240901,
  "out_dir": "results/desk"
})";

// 4-d, |X| = 10^4: objective draws and sample paths fall back to random
// Fourier features past the exact caps.
const char* kLarge = R"({
  "name": "large",
  "grid": {"d": 4, "levels": 10},
  "kernel": {"family": "se", "lengthscale": 0.2, "output_scale": 1.0},
  "noise_sd": 0.1,
  "rules": ["eims", "pims", "ts", "ucb", "irgp-ucb", "ei", "ei-mumax", "mes", "e3i"],
  "horizon": 300,
  "trials": 50,
  "master_seed": 20240901,
  "out_dir": "results/large",
  "path_sampling": {"exact_cap": 2000, "rff_features": 1024},
  "objective_sampling": {"exact_cap": 4096, "rff_features": 4096}
})";
}  // namespace

std::vector<std::string> preset_names() { return {"desk", "large"}; }

std::string preset_json(const std::string& name) {
  if (name == "desk") return kDesk;
  if (name == "large") return kLarge;
  throw ConfigError("unknown preset: " + name);
}

ExperimentConfig preset_config(const std::string& name) {
  return ExperimentConfig::from_json(preset_json(name));
}

}  // namespace eims
