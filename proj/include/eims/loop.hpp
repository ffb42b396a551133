#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eims/acquisitions.hpp"

namespace eims {

// Ground truth on a finite grid. Only noisy observations leave this type;
// acquisitions never see `values`.
struct Objective {
  Eigen::MatrixXd grid;    // m x d
  Eigen::VectorXd values;  // m
  double f_star = 0.0;
  int argmax_index = 0;
  bool rff_prior = false;  // true when the draw used an RFF approximation

  static Objective from_values(Eigen::MatrixXd grid, Eigen::VectorXd values);
  std::string fingerprint() const;
};

struct IterationRecord {
  int t = 0;
  int chosen_index = 0;
  double y = 0.0;
  double f = 0.0;
  std::optional<double> g_star;
  std::optional<double> eta;
  std::optional<double> schedule_value;
  double simple_regret = 0.0;
  double cum_regret = 0.0;
};

struct TrialTrace {
  std::vector<IterationRecord> iterations;
  std::string rule_name;
  std::string objective_fingerprint;
  std::uint64_t seed = 0;
  int init_count = 0;
  // Cumulative regret sums acquisition rounds only; init rounds are excluded
  // (recorded here so the other convention can be recomputed offline).
  std::vector<int> init_indices;
  std::vector<double> init_f;
};

double observe(const Objective& obj, int index, double noise_sd, Rng& rng);

// Per-iteration snapshot hook: grid means/sds of the posterior used for the
// selection at round t, plus the selection itself and the dataset size.
using IterationObserver =
    std::function<void(int t, int n_obs, const Eigen::VectorXd& means,
                       const Eigen::VectorXd& sds, const SelectionRecord& rec)>;

struct TrialOptions {
  PathSampling path_sampling;
  IterationObserver observer;  // optional
};

// Sequential BO driver. Sub-seeds are split in fixed order from `seed`:
// init design, observation noise, acquisition randomness (keyed by rule
// name), so adding a rule never perturbs the shared streams.
TrialTrace run_trial(const AcquisitionRule& rule, const Objective& obj,
                     const KernelSpec& kernel, double noise_var, int T,
                     int init_count, std::uint64_t seed,
                     const TrialOptions& options = {});

// argmax of the posterior mean over the grid, lowest-index tie-break.
int recommend(const GpPosterior& post, const Eigen::MatrixXd& grid);

}  // namespace eims
