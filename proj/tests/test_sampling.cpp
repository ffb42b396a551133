#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "eims/sampling.hpp"

using namespace eims;

namespace {
KernelSpec se(int d, double l) {
  return KernelSpec::isotropic(KernelFamily::SquaredExponential, d, l);
}

GpPosterior small_posterior(Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(6, 1);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = uni(rng);
    y[i] = normal(rng);
  }
  return GpPosterior::fit(se(1, 0.25), Dataset{X, y}, 0.05);
}

Eigen::MatrixXd line_grid(int m) {
  Eigen::MatrixXd g(m, 1);
  for (int i = 0; i < m; ++i) g(i, 0) = static_cast<double>(i) / m;
  return g;
}
}  // namespace

TEST_CASE("exact path marginals match the posterior") {
  Rng setup(2024);
  const GpPosterior post = small_posterior(setup);
  const Eigen::MatrixXd grid = line_grid(20);
  const auto [means, vars] = post.predict_batch(grid);

  Rng rng(9);
  const int n = 20000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(20), sum2 = Eigen::VectorXd::Zero(20);
  for (int s = 0; s < n; ++s) {
    const SamplePath path = sample_exact(post, grid, rng);
    REQUIRE(path.exact);
    sum += path.table;
    sum2 += path.table.cwiseProduct(path.table);
  }
  for (int i = 0; i < 20; ++i) {
    const double m = sum[i] / n;
    const double v = sum2[i] / n - m * m;
    CHECK(std::abs(m - means[i]) < 5.0 * std::sqrt(vars[i] / n) + 1e-6);
    CHECK(std::abs(v - vars[i]) < 0.1 * vars[i] + 1e-6);
  }
}

TEST_CASE("RFF feature inner products approximate the kernel") {
  // phi(x)'phi(y) with phi_i = coef * cos(w_i'x + p_i) estimates k(x, y);
  // at D = 4096 the Monte Carlo error sits well under 0.05.
  const GpPosterior prior = GpPosterior::fit(se(2, 0.3), Dataset{}, 1.0);
  Rng rng(13);
  const SamplePath path = sample_rff(prior, 4096, rng);
  REQUIRE_FALSE(path.exact);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd x(2), y(2);
    x << uni(rng), uni(rng);
    y << uni(rng), uni(rng);
    const Eigen::ArrayXd fx = (path.frequencies * x + path.phases).array().cos();
    const Eigen::ArrayXd fy = (path.frequencies * y + path.phases).array().cos();
    const double est = path.feature_coef * path.feature_coef * (fx * fy).sum();
    CHECK(std::abs(est - kernel_eval(prior.kernel(), x, y)) < 0.05);
  }
}

TEST_CASE("RFF paths approximate the posterior marginals") {
  Rng setup(2024);
  const GpPosterior post = small_posterior(setup);
  const Eigen::MatrixXd grid = line_grid(10);
  const auto [means, vars] = post.predict_batch(grid);

  Rng rng(13);
  const int n = 600;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(10), sum2 = Eigen::VectorXd::Zero(10);
  for (int s = 0; s < n; ++s) {
    const SamplePath path = sample_rff(post, 512, rng);
    REQUIRE_FALSE(path.exact);
    for (int i = 0; i < 10; ++i) {
      const double v = path.eval(grid.row(i).transpose());
      sum[i] += v;
      sum2[i] += v * v;
    }
  }
  for (int i = 0; i < 10; ++i) {
    const double m = sum[i] / n;
    const double v = sum2[i] / n - m * m;
    CHECK(std::abs(m - means[i]) < 0.15);
    CHECK(std::abs(v - vars[i]) < 0.15);
  }
}

TEST_CASE("RFF prior draw has roughly unit marginals") {
  const GpPosterior prior = GpPosterior::fit(se(2, 0.3), Dataset{}, 1.0);
  Rng rng(17);
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  const int n = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < n; ++s) {
    const SamplePath path = sample_rff(prior, 512, rng);
    const double v = path.eval(x);
    sum += v;
    sum2 += v * v;
  }
  const double m = sum / n;
  CHECK(std::abs(m) < 0.06);
  CHECK(std::abs(sum2 / n - m * m - 1.0) < 0.1);
}

TEST_CASE("path_max ties break to the lowest index") {
  SamplePath path;
  path.exact = true;
  path.table = Eigen::VectorXd(4);
  path.table << 1.0, 3.0, 3.0, 2.0;
  const auto [value, idx] = path_max(path, line_grid(4));
  CHECK(value == 3.0);
  CHECK(idx == 1);
}

TEST_CASE("unscrambled Sobol opens with the known points") {
  const SobolDesign d1 = sobol_init(1, 4, 0, false);
  CHECK(d1.points(0, 0) == 0.0);
  CHECK(d1.points(1, 0) == 0.5);
  CHECK(d1.points(2, 0) == doctest::Approx(0.75));
  CHECK(d1.points(3, 0) == doctest::Approx(0.25));
  const SobolDesign d2 = sobol_init(2, 4, 0, false);
  CHECK(d2.points(1, 0) == 0.5);
  CHECK(d2.points(1, 1) == 0.5);
}

TEST_CASE("Sobol points stratify each dimension") {
  // First 2^k points put exactly one point in each length-2^-k interval,
  // per dimension; the digital shift preserves this.
  for (int d = 1; d <= 6; ++d) {
    const int n = 64;
    const SobolDesign design = sobol_init(d, n, 99, true);
    for (int j = 0; j < d; ++j) {
      std::set<int> cells;
      for (int i = 0; i < n; ++i) {
        CHECK(design.points(i, j) >= 0.0);
        CHECK(design.points(i, j) < 1.0);
        cells.insert(static_cast<int>(design.points(i, j) * n));
      }
      CHECK(cells.size() == static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("2-d Sobol balances elementary squares") {
  const int n = 16;
  const SobolDesign design = sobol_init(2, n, 0, false);
  int counts[4][4] = {};
  for (int i = 0; i < n; ++i)
    ++counts[static_cast<int>(design.points(i, 0) * 4)]
            [static_cast<int>(design.points(i, 1) * 4)];
  for (auto& row : counts)
    for (int c : row) CHECK(c == 1);
}

TEST_CASE("scrambling is deterministic in the seed") {
  const SobolDesign a = sobol_init(3, 32, 7, true);
  const SobolDesign b = sobol_init(3, 32, 7, true);
  const SobolDesign c = sobol_init(3, 32, 8, true);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("dimension beyond the direction-number table throws") {
  CHECK_THROWS(sobol_init(22, 4, 0));
  CHECK_NOTHROW(sobol_init(21, 4, 0));
}

TEST_CASE("snap_to_grid returns distinct nearest points") {
  Eigen::MatrixXd grid(5, 1);
  grid << 0.0, 0.25, 0.5, 0.75, 1.0;
  SobolDesign design;
  design.points = Eigen::MatrixXd(3, 1);
  design.points << 0.26, 0.24, 0.9;
  const std::vector<int> idx = snap_to_grid(design, grid);
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == 1);  // 0.26 -> 0.25
  CHECK(idx[1] == 0);  // 0.24 would pick 0.25 too, but it is taken; 0.0 is next
  CHECK(idx[2] == 4);
  std::set<int> uniq(idx.begin(), idx.end());
  CHECK(uniq.size() == 3);
}
