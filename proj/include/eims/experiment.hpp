#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eims/loop.hpp"
#include "eims/synthetic.hpp"

namespace eims {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a benchmark run needs; serializable to/from JSON.
struct ExperimentConfig {
  std::string name = "experiment";
  GridSpec grid;
  KernelSpec kernel = KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 0.2);
  double noise_sd = 0.1;
  std::vector<AcquisitionRule> rules;
  int horizon = 100;
  int trials = 16;
  int init_count = -1;  // -1 -> 2^d
  std::uint64_t master_seed = 20240901;
  int threads = 0;  // 0 -> hardware concurrency
  std::string out_dir = "results";
  PathSampling path_sampling;
  ObjectiveSampling objective_sampling;

  int resolved_init_count() const;
  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& file);
};

struct AggregateRow {
  std::string rule;
  int t = 0;
  std::string metric;  // "simple_regret" | "cum_regret"
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  // traces[trial][rule_index]
  std::vector<std::vector<TrialTrace>> traces;
  std::vector<AggregateRow> aggregate;
};

// Runs trials in parallel (paired across rules: shared objective, init design
// and noise stream per trial). Deterministic for a fixed config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate_traces(
    const std::vector<std::vector<TrialTrace>>& traces,
    const std::vector<AcquisitionRule>& rules, int horizon);

// Persistence: traces/trial-<i>-<rule>.csv, aggregate.csv, one SVG per metric,
// and the resolved config as experiment.json.
void write_results(const ExperimentResult& result,
                   const std::filesystem::path& out_dir);

std::vector<AggregateRow> read_aggregate(const std::filesystem::path& csv);
void write_plot_svg(const std::vector<AggregateRow>& rows,
                    const std::string& metric, const std::filesystem::path& path);

}  // namespace eims
