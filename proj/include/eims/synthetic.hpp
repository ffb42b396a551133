#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "eims/kernels.hpp"
#include "eims/loop.hpp"

namespace eims {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full Cartesian product of per-dimension levels.
struct GridSpec {
  int d = 1;
  std::vector<double> levels;  // shared across dimensions

  long long size() const;
  void validate() const;
};

// Row-major Cartesian product, last dimension fastest.
Eigen::MatrixXd make_grid(const GridSpec& spec, long long memory_cap = 1'000'000);

struct ObjectiveSampling {
  int exact_cap = 4096;    // exact Cholesky prior draw up to this grid size
  int rff_features = 4096; // beyond the cap, an RFF prior draw is used
};

// One draw from the GP prior on the grid; f_star/argmax by scan.
Objective sample_objective(const KernelSpec& kernel, const Eigen::MatrixXd& grid,
                           Rng& rng, const ObjectiveSampling& os = {});

}  // namespace eims
