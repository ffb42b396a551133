#include "eims/synthetic.hpp"

#include <cmath>

#include "eims/sampling.hpp"

namespace eims {

long long GridSpec::size() const {
  long long m = 1;
  for (int j = 0; j < d; ++j) m *= static_cast<long long>(levels.size());
  return m;
}

void GridSpec::validate() const {
  if (d < 1) throw std::invalid_argument("GridSpec: d must be >= 1");
  if (levels.size() < 2) throw std::invalid_argument("GridSpec: need >= 2 levels");
}

Eigen::MatrixXd make_grid(const GridSpec& spec, long long memory_cap) {
  spec.validate();
  const long long m = spec.size();
  if (m > memory_cap) throw CapacityError("make_grid: grid exceeds memory cap");
  const int L = static_cast<int>(spec.levels.size());
  Eigen::MatrixXd grid(m, spec.d);
  for (long long i = 0; i < m; ++i) {
    long long rem = i;
    for (int j = spec.d - 1; j >= 0; --j) {
      grid(i, j) = spec.levels[rem % L];
      rem /= L;
    }
  }
  return grid;
}

Objective sample_objective(const KernelSpec& kernel, const Eigen::MatrixXd& grid,
                           Rng& rng, const ObjectiveSampling& os) {
  const int m = static_cast<int>(grid.rows());
  if (m < 1) throw std::invalid_argument("sample_objective: empty grid");
  Eigen::VectorXd values(m);
  bool rff = false;
  if (m <= os.exact_cap) {
    Eigen::MatrixXd K = kernel_matrix(kernel, grid);
    K.diagonal().array() += 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
      throw FactorizationError("sample_objective: prior covariance factorization failed");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z[i] = normal(rng);
    values = Eigen::MatrixXd(llt.matrixL()) * z;
  } else {
    const GpPosterior prior = GpPosterior::fit(kernel, Dataset{}, 1.0);
    const SamplePath path = sample_rff(prior, os.rff_features, rng);
    for (int i = 0; i < m; ++i) values[i] = path.eval(grid.row(i).transpose());
    rff = true;
  }
  Objective obj = Objective::from_values(grid, std::move(values));
  obj.rff_prior = rff;
  return obj;
}

}  // namespace eims
