#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "eims/gp.hpp"

namespace eims {

// One realization of the posterior. Exact mode stores a value table over a
// fixed grid; RFF mode stores a trigonometric feature expansion evaluable at
// any point.
struct SamplePath {
  bool exact = true;
  Eigen::VectorXd table;  // exact mode: value per grid row

  Eigen::MatrixXd frequencies;  // D x d
  Eigen::VectorXd phases;       // D
  Eigen::VectorXd weights;      // D
  double feature_coef = 0.0;    // sqrt(2 * output_scale / D)

  // RFF-mode evaluation at an arbitrary point.
  double eval(const Eigen::VectorXd& x) const;
};

struct SobolDesign {
  Eigen::MatrixXd points;  // n x d, in [0, 1)
};

// Joint draw from the posterior restricted to the grid (m x m Cholesky with
// 1e-10 jitter on the posterior covariance).
SamplePath sample_exact(const GpPosterior& post, const Eigen::MatrixXd& grid, Rng& rng);

// Pathwise draw through a Bayesian linear model on random Fourier features.
SamplePath sample_rff(const GpPosterior& post, int feature_count, Rng& rng);

// Exact maximum over the grid; ties broken by lowest index.
std::pair<double, int> path_max(const SamplePath& path, const Eigen::MatrixXd& grid);

// First n points of a (digitally shifted) Sobol sequence in [0,1)^d.
SobolDesign sobol_init(int d, int n, std::uint64_t seed, bool scramble = true);

// Nearest distinct grid points to the design, greedy in design order.
std::vector<int> snap_to_grid(const SobolDesign& design, const Eigen::MatrixXd& grid);

}  // namespace eims
