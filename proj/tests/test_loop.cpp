#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "eims/loop.hpp"
#include "eims/synthetic.hpp"

using namespace eims;

namespace {
KernelSpec se(int d, double l) {
  return KernelSpec::isotropic(KernelFamily::SquaredExponential, d, l);
}

GridSpec grid_spec(int d, int levels) {
  GridSpec spec;
  spec.d = d;
  spec.levels.resize(levels);
  for (int i = 0; i < levels; ++i) spec.levels[i] = static_cast<double>(i) / levels;
  return spec;
}

Objective test_objective(int levels = 12, std::uint64_t seed = 3) {
  const Eigen::MatrixXd grid = make_grid(grid_spec(1, levels));
  Rng rng(seed);
  return sample_objective(se(1, 0.2), grid, rng);
}

bool traces_equal(const TrialTrace& a, const TrialTrace& b) {
  if (a.iterations.size() != b.iterations.size()) return false;
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    const auto& x = a.iterations[i];
    const auto& y = b.iterations[i];
    if (x.chosen_index != y.chosen_index || x.y != y.y || x.f != y.f ||
        x.simple_regret != y.simple_regret || x.cum_regret != y.cum_regret)
      return false;
  }
  return a.init_indices == b.init_indices;
}
}  // namespace

TEST_CASE("make_grid enumerates the Cartesian product, last dim fastest") {
  const Eigen::MatrixXd g = make_grid(grid_spec(2, 3));
  REQUIRE(g.rows() == 9);
  REQUIRE(g.cols() == 2);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == 0.0);
  CHECK(g(1, 0) == 0.0);
  CHECK(g(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(g(3, 0) == doctest::Approx(1.0 / 3));
  CHECK(g(3, 1) == 0.0);
  CHECK(g(8, 0) == doctest::Approx(2.0 / 3));
  CHECK(g(8, 1) == doctest::Approx(2.0 / 3));
}

TEST_CASE("make_grid enforces the memory cap") {
  CHECK_THROWS_AS(make_grid(grid_spec(8, 12)), CapacityError);
  CHECK_THROWS(grid_spec(0, 3).validate());
}

TEST_CASE("sampled objectives expose their exact argmax") {
  const Objective obj = test_objective();
  CHECK(obj.f_star == obj.values.maxCoeff());
  CHECK(obj.values[obj.argmax_index] == obj.f_star);
  CHECK_FALSE(obj.rff_prior);
  CHECK_FALSE(obj.fingerprint().empty());
}

TEST_CASE("objective draws are deterministic in the rng") {
  const Eigen::MatrixXd grid = make_grid(grid_spec(1, 10));
  Rng a(5), b(5), c(6);
  const Objective o1 = sample_objective(se(1, 0.2), grid, a);
  const Objective o2 = sample_objective(se(1, 0.2), grid, b);
  const Objective o3 = sample_objective(se(1, 0.2), grid, c);
  CHECK(o1.fingerprint() == o2.fingerprint());
  CHECK(o1.fingerprint() != o3.fingerprint());
}

TEST_CASE("large grids fall back to an RFF prior draw") {
  const Eigen::MatrixXd grid = make_grid(grid_spec(1, 40));
  Rng rng(8);
  ObjectiveSampling os;
  os.exact_cap = 30;
  os.rff_features = 512;
  const Objective obj = sample_objective(se(1, 0.2), grid, rng, os);
  CHECK(obj.rff_prior);
  CHECK(obj.values.size() == 40);
}

TEST_CASE("observe adds zero-mean noise of the right scale") {
  const Objective obj = test_objective();
  Rng rng(21);
  const int n = 20000;
  const double sd = 0.3;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = observe(obj, 4, sd, rng) - obj.values[4];
    sum += e;
    sum2 += e * e;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(std::sqrt(sum2 / n) - sd) < 0.01);
  CHECK_THROWS(observe(obj, -1, sd, rng));
  CHECK_THROWS(observe(obj, 99, sd, rng));
  CHECK_THROWS(observe(obj, 0, 0.0, rng));
}

TEST_CASE("run_trial produces a complete, consistent trace") {
  const Objective obj = test_objective();
  AcquisitionRule rule;  // eims
  const TrialTrace trace = run_trial(rule, obj, se(1, 0.2), 0.01, 25, 2, 42);
  REQUIRE(trace.iterations.size() == 25);
  CHECK(trace.rule_name == "eims");
  CHECK(trace.init_count == 2);
  CHECK(trace.init_indices.size() == 2);
  CHECK(std::set<int>(trace.init_indices.begin(), trace.init_indices.end()).size() == 2);
  double cum = 0.0;
  for (const auto& it : trace.iterations) {
    cum += obj.f_star - it.f;
    CHECK(it.cum_regret == doctest::Approx(cum).epsilon(1e-12));
    CHECK(it.simple_regret >= 0.0);
    CHECK(it.f == obj.values[it.chosen_index]);
    REQUIRE(it.g_star.has_value());
    REQUIRE(it.eta.has_value());
  }
}

TEST_CASE("run_trial is deterministic in the seed") {
  const Objective obj = test_objective();
  AcquisitionRule rule;
  const TrialTrace a = run_trial(rule, obj, se(1, 0.2), 0.01, 15, 2, 42);
  const TrialTrace b = run_trial(rule, obj, se(1, 0.2), 0.01, 15, 2, 42);
  const TrialTrace c = run_trial(rule, obj, se(1, 0.2), 0.01, 15, 2, 43);
  CHECK(traces_equal(a, b));
  CHECK_FALSE(traces_equal(a, c));
}

TEST_CASE("rules share the init design and noise stream for a given seed") {
  const Objective obj = test_objective();
  const TrialTrace eims =
      run_trial(AcquisitionRule::from_name("eims"), obj, se(1, 0.2), 0.01, 10, 4, 42);
  const TrialTrace ucb =
      run_trial(AcquisitionRule::from_name("ucb"), obj, se(1, 0.2), 0.01, 10, 4, 42);
  CHECK(eims.init_indices == ucb.init_indices);
  CHECK(eims.init_f == ucb.init_f);
}

TEST_CASE("values at never-queried points cannot influence the run") {
  const Objective obj = test_objective(20, 9);
  AcquisitionRule rule;
  const TrialTrace base = run_trial(rule, obj, se(1, 0.2), 0.01, 12, 2, 7);
  std::set<int> touched(base.init_indices.begin(), base.init_indices.end());
  for (const auto& it : base.iterations) touched.insert(it.chosen_index);
  REQUIRE(touched.size() < 20);
  // Shift every untouched value down; the query sequence must not move.
  Eigen::VectorXd tweaked = obj.values;
  for (int i = 0; i < 20; ++i)
    if (!touched.count(i)) tweaked[i] -= 5.0;
  const Objective shadow = Objective::from_values(obj.grid, tweaked);
  const TrialTrace redo = run_trial(rule, shadow, se(1, 0.2), 0.01, 12, 2, 7);
  REQUIRE(redo.iterations.size() == base.iterations.size());
  CHECK(redo.init_indices == base.init_indices);
  for (std::size_t i = 0; i < base.iterations.size(); ++i)
    CHECK(redo.iterations[i].chosen_index == base.iterations[i].chosen_index);
}

TEST_CASE("every rule runs end to end") {
  const Objective obj = test_objective();
  for (const char* name : {"eims", "pims", "ts", "ucb", "irgp-ucb", "ei", "ei-mumax",
                           "ei-mumax-evaluated", "mes", "e3i"}) {
    AcquisitionRule rule = AcquisitionRule::from_name(name);
    rule.mc_samples = 3;
    const TrialTrace trace = run_trial(rule, obj, se(1, 0.2), 0.01, 5, 2, 11);
    CHECK(trace.iterations.size() == 5);
    CHECK(trace.rule_name == name);
  }
}

TEST_CASE("classic ei with no initial design throws") {
  const Objective obj = test_objective();
  CHECK_THROWS_AS(run_trial(AcquisitionRule::from_name("ei"), obj, se(1, 0.2), 0.01,
                            5, 0, 11),
                  EmptyHistory);
}

TEST_CASE("observer sees the pre-selection posterior") {
  const Objective obj = test_objective();
  AcquisitionRule rule;
  TrialOptions opts;
  int calls = 0;
  opts.observer = [&](int t, int n_obs, const Eigen::VectorXd& means,
                      const Eigen::VectorXd& sds, const SelectionRecord& rec) {
    ++calls;
    CHECK(t == calls);
    CHECK(n_obs == 2 + (t - 1));
    CHECK(means.size() == obj.grid.rows());
    CHECK(sds.size() == obj.grid.rows());
    CHECK(sds.minCoeff() > 0.0);
    CHECK(rec.chosen >= 0);
    CHECK(rec.chosen < obj.grid.rows());
  };
  run_trial(rule, obj, se(1, 0.2), 0.01, 8, 2, 13, opts);
  CHECK(calls == 8);
}

TEST_CASE("recommend returns the posterior-mean argmax") {
  Eigen::MatrixXd X(2, 1);
  X << 0.2, 0.8;
  Eigen::VectorXd y(2);
  y << -1.0, 2.0;
  const GpPosterior post = GpPosterior::fit(se(1, 0.2), Dataset{X, y}, 0.01);
  Eigen::MatrixXd grid(5, 1);
  grid << 0.0, 0.25, 0.5, 0.75, 1.0;
  const int idx = recommend(post, grid);
  const Eigen::VectorXd means = post.predict_batch(grid).first;
  CHECK(means[idx] == means.maxCoeff());
  CHECK(idx == 3);
}
