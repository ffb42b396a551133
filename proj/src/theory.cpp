#include "eims/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eims/gaussmath.hpp"
#include "eims/sampling.hpp"

namespace eims::theory {

namespace {
using gaussmath::q_upper_bound;
using gaussmath::std_normal_cdf;
using gaussmath::std_normal_pdf;
using gaussmath::std_normal_sf;
using gaussmath::tau;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtPiOver2 = 1.2533141373155002512078826;

void track(CheckReport& rep, double margin) {
  ++rep.cases;
  if (rep.cases == 1 || margin < rep.worst_margin) rep.worst_margin = margin;
  if (margin < 0.0) ++rep.violations;
}

Eigen::MatrixXd desk_grid(const DeskConfig& cfg) {
  GridSpec spec;
  spec.d = cfg.d;
  spec.levels.resize(cfg.levels);
  for (int i = 0; i < cfg.levels; ++i)
    spec.levels[i] = static_cast<double>(i) / cfg.levels;
  return make_grid(spec);
}
}  // namespace

BoundConstants compute_constants(long long domain_size, double noise_var, int T,
                                 double delta, std::optional<ContinuousParams> cont) {
  if (domain_size < 2) throw std::domain_error("compute_constants: |X| must be >= 2");
  if (!(noise_var > 0.0)) throw std::domain_error("compute_constants: noise_var > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("compute_constants: delta in (0,1)");
  if (T < 1) throw std::domain_error("compute_constants: T >= 1");
  BoundConstants c;
  c.c1 = 2.0 / std::log1p(1.0 / noise_var);
  c.beta_delta = 2.0 * std::log(domain_size / (2.0 * delta));
  c.c2 = 2.0 + 2.0 * std::log(domain_size / 2.0);
  const double log_ratio = std::log((noise_var + T - 1.0) / noise_var);
  c.b_t_discrete = log_ratio + c.c2 + std::sqrt(2.0 * M_PI * c.c2);
  if (cont) {
    if (!(cont->a >= 1.0 && cont->b > 0.0 && cont->r > 0.0 && cont->d >= 1))
      throw std::domain_error("compute_constants: invalid continuous params");
    const double raw = cont->b * cont->d * cont->r *
                       std::sqrt((noise_var + T - 1.0) *
                                 std::log(2.0 * cont->a * cont->d) / noise_var);
    c.m_t = std::max<long long>(2, static_cast<long long>(std::ceil(raw)));
    c.c_t = 8.0 * (cont->d * std::log(static_cast<double>(*c.m_t)) + 1.0);
    c.b_t_continuous = log_ratio + *c.c_t + std::sqrt(2.0 * M_PI * *c.c_t);
  }
  return c;
}

double eta_bound(int t, double noise_var, double beta) {
  if (t < 1 || !(noise_var > 0.0) || !(beta > 0.0))
    throw std::domain_error("eta_bound: invalid inputs");
  return std::sqrt(std::log((noise_var + t - 1.0) / noise_var) + beta +
                   std::sqrt(2.0 * M_PI * beta));
}

double bcr_bound(int T, double c1, double b_t, double gamma_hat) {
  return std::sqrt(c1 * b_t * T * gamma_hat);
}

std::vector<double> mig_greedy(const KernelSpec& kernel, const Eigen::MatrixXd& grid,
                               int T, double noise_var, long long capacity_cap) {
  if (T < 1) throw std::invalid_argument("mig_greedy: T >= 1");
  if (grid.rows() > capacity_cap) throw CapacityError("mig_greedy: grid too large");
  GpPosterior post = GpPosterior::fit(kernel, Dataset{}, noise_var);
  std::vector<double> gains;
  double acc = 0.0;
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd vars = post.predict_batch(grid).second;
    int best = 0;
    for (int i = 1; i < vars.size(); ++i)
      if (vars[i] > vars[best]) best = i;
    acc += 0.5 * std::log1p(vars[best] / noise_var);
    gains.push_back(acc);
    post = post.extend(grid.row(best).transpose(), 0.0);
  }
  return gains;
}

double mig_exact(const KernelSpec& kernel, const Eigen::MatrixXd& grid, int T,
                 double noise_var) {
  const int m = static_cast<int>(grid.rows());
  if (m > 12 || T > 4)
    throw CapacityError("mig_exact: exhaustive search limited to |grid| <= 12, T <= 4");
  double best = 0.0;
  std::vector<int> combo(T, 0);
  // Multisets via nondecreasing index tuples.
  while (true) {
    Eigen::MatrixXd A(T, grid.cols());
    for (int i = 0; i < T; ++i) A.row(i) = grid.row(combo[i]);
    Eigen::MatrixXd M = kernel_matrix(kernel, A) / noise_var;
    M.diagonal().array() += 1.0;
    const double info = 0.5 * std::log(M.llt().matrixL().determinant()) * 2.0;
    best = std::max(best, info);
    int k = T - 1;
    while (k >= 0 && combo[k] == m - 1) --k;
    if (k < 0) break;
    ++combo[k];
    for (int i = k + 1; i < T; ++i) combo[i] = combo[k];
  }
  return best;
}

std::vector<double> counterexample_constant_query(const KernelSpec& kernel,
                                                  const Eigen::MatrixXd& grid,
                                                  int query_index, int probe_index,
                                                  double noise_var, int T) {
  const Eigen::VectorXd q = grid.row(query_index).transpose();
  const Eigen::VectorXd p = grid.row(probe_index).transpose();
  GpPosterior post = GpPosterior::fit(kernel, Dataset{}, noise_var);
  std::vector<double> prefix;
  double acc = 0.0;
  for (int t = 1; t <= T; ++t) {
    post = post.extend(q, 0.0);
    acc += post.predict(p).second;
    prefix.push_back(acc);
  }
  return prefix;
}

CheckReport check_q_bound(int grid_points) {
  CheckReport rep{"q-bound", "1 - Phi(c) <= (1/c)(1 - exp(-sqrt(pi/2) c)) phi(c) on (0, 10]", 0, 0, 0.0};
  for (int i = 1; i <= grid_points; ++i) {
    const double c = 10.0 * i / grid_points;
    track(rep, q_upper_bound(c) - std_normal_sf(c));
  }
  return rep;
}

CheckReport check_tau_lower_bound(int grid_points) {
  CheckReport rep{"tau-lower-bound",
                  "tau(-sqrt(b)) >= exp(-sqrt(pi/2) sqrt(b)) phi(sqrt(b)) on (0, 40]", 0, 0, 0.0};
  for (int i = 1; i <= grid_points; ++i) {
    const double beta = 40.0 * i / grid_points;
    const double rb = std::sqrt(beta);
    track(rep, tau(-rb) - std::exp(-kSqrtPiOver2 * rb) * std_normal_pdf(rb));
  }
  return rep;
}

CheckReport check_tau_identity(int grid_points) {
  CheckReport rep{"tau-identity",
                  "|tau(c) - (c Phi(c) + phi(c))| <= 1e-12 and |tau(c) - c - tau(-c)| <= 1e-13 on [-8, 8]",
                  0, 0, 0.0};
  for (int i = 0; i < grid_points; ++i) {
    const double c = -8.0 + 16.0 * i / (grid_points - 1);
    const double direct = c * std_normal_cdf(c) + std_normal_pdf(c);
    track(rep, 1e-12 - std::abs(tau(c) - direct));
    track(rep, 1e-13 - std::abs(tau(c) - c - tau(-c)));
  }
  return rep;
}

CheckReport check_tau_monotonic(int grid_points) {
  CheckReport rep{"tau-monotonic", "tau strictly increasing on [-8, 8]", 0, 0, 0.0};
  double prev = tau(-8.0);
  for (int i = 1; i < grid_points; ++i) {
    const double c = -8.0 + 16.0 * i / (grid_points - 1);
    const double cur = tau(c);
    track(rep, cur - prev);
    prev = cur;
  }
  return rep;
}

CheckReport check_ei_sandwich(int tuples, std::uint64_t seed) {
  CheckReport rep{"ei-sandwich",
                  "max{(a-b)+ - sqrt(B) s, (tau(-sqrt(B/v))/tau(sqrt(B/v)))(a-b)+} <= EI(mu, sqrt(v) s, b) <= (a-b)+ + (sqrt(B)+sqrt(v)) s",
                  0, 0, 0.0};
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < tuples; ++i) {
    const double mu = normal(rng);
    const double sd = 0.1 + 1.9 * uni(rng);
    const double beta = 0.1 + 19.9 * uni(rng);
    const double nu = 0.1 + 19.9 * uni(rng);
    const double a = mu + (2.0 * uni(rng) - 1.0) * std::sqrt(beta) * sd;
    const double b = 2.0 * normal(rng);
    const double ei = ei_value(mu, std::sqrt(nu) * sd, b);
    const double gap = std::max(a - b, 0.0);
    const double ratio = tau(-std::sqrt(beta / nu)) / tau(std::sqrt(beta / nu));
    const double lower = std::max(gap - std::sqrt(beta) * sd, ratio * gap);
    const double upper = gap + (std::sqrt(beta) + std::sqrt(nu)) * sd;
    track(rep, ei - lower + 1e-12);
    track(rep, upper - ei + 1e-12);
  }
  return rep;
}

CheckReport check_ei_vs_mc(int tuples, int samples, std::uint64_t seed) {
  CheckReport rep{"ei-vs-mc",
                  "|EI closed form - MC estimate| <= 3 MC stderr (zero-hit cases vacuous)", 0, 0, 0.0};
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < tuples; ++i) {
    const double mean = 2.0 * normal(rng);
    const double sd = 0.05 + 2.0 * uni(rng);
    const double ref = 2.0 * normal(rng);
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double v = std::max(mean + sd * normal(rng) - ref, 0.0);
      sum += v;
      sum2 += v * v;
    }
    const double mc = sum / samples;
    const double var = std::max(sum2 / samples - mc * mc, 0.0);
    const double se = std::sqrt(var / samples);
    // A zero-hit estimate is Poisson-consistent with any expected positive
    // count up to ~10; the comparison carries no information there.
    const double expected_hits = samples * std_normal_cdf((mean - ref) / sd);
    if (mc == 0.0 && expected_hits <= 10.0) {
      track(rep, 0.0);
      continue;
    }
    track(rep, 3.0 * se - std::abs(ei_value(mean, sd, ref) - mc));
  }
  return rep;
}

CheckReport check_expected_max_bound(std::uint64_t seed, int draws) {
  CheckReport rep{"expected-max", "MC E[max f] <= sqrt(2 log(|X|/2) + 2) for |X| in {4, 16, 256}", 0, 0, 0.0};
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int m : {4, 16, 256}) {
    const KernelSpec kernel = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.1);
    Eigen::MatrixXd grid(m, 2);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < 2; ++j) grid(i, j) = uni(rng);
    Eigen::MatrixXd K = kernel_matrix(kernel, grid);
    K.diagonal().array() += 1e-10;
    const Eigen::MatrixXd L = K.llt().matrixL();
    double acc = 0.0;
    Eigen::VectorXd z(m);
    for (int s = 0; s < draws; ++s) {
      for (int i = 0; i < m; ++i) z[i] = normal(rng);
      acc += (L * z).maxCoeff();
    }
    const double bound = std::sqrt(2.0 * std::log(m / 2.0) + 2.0);
    track(rep, bound - acc / draws);
  }
  return rep;
}

CheckReport check_counterexample() {
  CheckReport rep{"counterexample",
                  "separated probe: increments >= C - 1e-9 and S(T)/S(T/2) in [1.9, 2.1]; same-point probe: ratio <= 1.6",
                  0, 0, 0.0};
  const KernelSpec kernel = KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 0.1);
  Eigen::MatrixXd grid(2, 1);
  grid << 0.0, 1.0;
  const double k01 = kernel_eval(kernel, grid.row(0).transpose(), grid.row(1).transpose());
  const double C = kernel.output_scale - k01 * k01 / kernel.output_scale;
  const int T = 200;
  const auto separated = counterexample_constant_query(kernel, grid, 0, 1, 1.0, T);
  double prev = 0.0;
  for (double s : separated) {
    track(rep, (s - prev) - (C - 1e-9));
    prev = s;
  }
  const double ratio = separated[T - 1] / separated[T / 2 - 1];
  track(rep, ratio - 1.9);
  track(rep, 2.1 - ratio);
  const auto same = counterexample_constant_query(kernel, grid, 0, 0, 1.0, T);
  track(rep, 1.6 - same[T - 1] / same[T / 2 - 1]);
  return rep;
}

CheckReport check_mig_greedy_vs_exact(std::uint64_t seed, int kernels) {
  CheckReport rep{"mig-greedy-vs-exact",
                  "greedy gain <= exact MIG and >= (1 - 1/e) exact, |grid| <= 12, T <= 4", 0, 0, 0.0};
  Rng rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> pick_m(4, 12), pick_T(1, 4), pick_fam(0, 3);
  const KernelFamily fams[] = {KernelFamily::SquaredExponential, KernelFamily::Matern12,
                               KernelFamily::Matern32, KernelFamily::Matern52};
  for (int k = 0; k < kernels; ++k) {
    const int m = pick_m(rng);
    const int T = pick_T(rng);
    const KernelSpec kernel =
        KernelSpec::isotropic(fams[pick_fam(rng)], 2, 0.1 + 0.9 * uni(rng));
    const double noise_var = 0.1 + 0.9 * uni(rng);
    Eigen::MatrixXd grid(m, 2);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < 2; ++j) grid(i, j) = uni(rng);
    const double greedy = mig_greedy(kernel, grid, T, noise_var).back();
    const double exact = mig_exact(kernel, grid, T, noise_var);
    track(rep, exact - greedy + 1e-9);
    track(rep, greedy - (1.0 - std::exp(-1.0)) * exact + 1e-9);
  }
  return rep;
}

CheckReport check_probability_matching(std::uint64_t seed, int draws) {
  CheckReport rep{"probability-matching",
                  "two-sample KS(path_max draws, fresh posterior-max draws) below the 1% critical value",
                  0, 0, 0.0};
  // Fixed 50-point posterior from 5 noisy observations.
  const KernelSpec kernel = KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 0.3);
  Rng setup(derive_seed(seed, {1}));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd grid(50, 1);
  for (int i = 0; i < 50; ++i) grid(i, 0) = i / 50.0;
  Eigen::MatrixXd Xtr(5, 1);
  Eigen::VectorXd ytr(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    Xtr(i, 0) = uni(setup);
    ytr[i] = normal(setup);
  }
  const GpPosterior post = GpPosterior::fit(kernel, Dataset{Xtr, ytr}, 0.05);

  Rng rng_a(derive_seed(seed, {2})), rng_b(derive_seed(seed, {3}));
  std::vector<double> a(draws), b(draws);
  for (int s = 0; s < draws; ++s)
    a[s] = path_max(sample_exact(post, grid, rng_a), grid).first;
  // Independent oracle: direct multivariate-normal maxima.
  const Eigen::VectorXd means = post.predict_batch(grid).first;
  Eigen::MatrixXd C = post.posterior_cov(grid);
  C.diagonal().array() += 1e-10;
  const Eigen::MatrixXd L = C.llt().matrixL();
  Eigen::VectorXd z(grid.rows());
  for (int s = 0; s < draws; ++s) {
    for (int i = 0; i < z.size(); ++i) z[i] = normal(rng_b);
    b[s] = (means + L * z).maxCoeff();
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / a.size() -
                               static_cast<double>(j) / b.size()));
  }
  const double critical = 1.628 * std::sqrt(2.0 / draws);  // alpha = 0.01
  track(rep, critical - ks);
  return rep;
}

TraceChecks run_trace_checks(const DeskConfig& cfg) {
  TraceChecks out;
  out.eta_check = {"eta-bound",
                   "when g*_t <= max(mu + sqrt(beta(delta)) sd): eta_t <= eta_bound(t)", 0, 0, 0.0};
  out.eta_event_rate = {"eta-event-rate",
                        "fraction of iterations with g*_t <= max UCB(beta(delta)) >= 0.90", 0, 0, 0.0};
  out.variance_floor = {"variance-floor", "min_x var_t(x) >= noise_var/(noise_var + t) - 1e-9", 0, 0, 0.0};
  out.mean_ref_bound = {"mean-ref-bound",
                        "b - mu(x_t) <= sqrt(log((t-1+s2)/s2)) sqrt(nu_t) sd(x_t) along EI-mumax runs",
                        0, 0, 0.0};

  const Eigen::MatrixXd grid = desk_grid(cfg);
  const long long domain_size = grid.rows();
  const KernelSpec kernel =
      KernelSpec::isotropic(KernelFamily::SquaredExponential, cfg.d, cfg.lengthscale);
  const double noise_var = cfg.noise_sd * cfg.noise_sd;
  const double beta_delta = 2.0 * std::log(domain_size / (2.0 * cfg.delta));
  const int init_count = 1 << cfg.d;

  long long event_count = 0, total_iters = 0;
  double cum_sum = 0.0;

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng obj_rng = make_rng(cfg.master_seed, {static_cast<std::uint64_t>(trial), 0});
    const Objective obj = sample_objective(kernel, grid, obj_rng);
    const std::uint64_t trial_seed =
        derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(trial), 1});

    TrialOptions opts;
    opts.observer = [&](int t, int n_obs, const Eigen::VectorXd& means,
                        const Eigen::VectorXd& sds, const SelectionRecord& rec) {
      ++total_iters;
      // Variance floor over the whole grid.
      const double floor = noise_var / (noise_var + n_obs);
      double min_slack = kInf;
      for (int i = 0; i < sds.size(); ++i)
        min_slack = std::min(min_slack, sds[i] * sds[i] - floor);
      track(out.variance_floor, min_slack + 1e-9);
      // Eta implication.
      const double max_ucb =
          (means.array() + std::sqrt(beta_delta) * sds.array()).maxCoeff();
      if (rec.g_star && *rec.g_star <= max_ucb) {
        ++event_count;
        track(out.eta_check, eta_bound(n_obs + 1, noise_var, beta_delta) - *rec.eta);
      }
    };
    AcquisitionRule eims;
    eims.kind = AcquisitionKind::EIMS;
    const TrialTrace trace =
        run_trial(eims, obj, kernel, noise_var, cfg.horizon, init_count, trial_seed, opts);
    cum_sum += trace.iterations.back().cum_regret;

    // EI-mumax run for the mean-reference bound.
    TrialOptions mopts;
    mopts.observer = [&](int t, int n_obs, const Eigen::VectorXd& means,
                         const Eigen::VectorXd& sds, const SelectionRecord& rec) {
      const double b = means.maxCoeff();  // GlobalMean reference
      const double nu = *rec.schedule_value;
      const double lhs = b - means[rec.chosen];
      const double rhs = std::sqrt(std::log((n_obs + noise_var) / noise_var)) *
                         std::sqrt(nu) * sds[rec.chosen];
      track(out.mean_ref_bound, rhs - lhs + 1e-9);
    };
    AcquisitionRule mumax;
    mumax.kind = AcquisitionKind::EIMuMax;
    run_trial(mumax, obj, kernel, noise_var, cfg.horizon, init_count, trial_seed, mopts);
  }

  const double rate = static_cast<double>(event_count) / total_iters;
  track(out.eta_event_rate, rate - 0.90);
  out.mean_cum_regret_eims = cum_sum / cfg.trials;
  return out;
}

std::vector<CheckReport> run_verify_battery(const std::string& filter,
                                            const DeskConfig& cfg) {
  std::vector<CheckReport> reports;
  auto want = [&](const std::string& name) { return filter.empty() || filter == name; };
  if (want("q-bound")) reports.push_back(check_q_bound());
  if (want("tau-lower-bound")) reports.push_back(check_tau_lower_bound());
  if (want("tau-identity")) reports.push_back(check_tau_identity());
  if (want("tau-monotonic")) reports.push_back(check_tau_monotonic());
  if (want("ei-sandwich")) reports.push_back(check_ei_sandwich());
  if (want("ei-vs-mc")) reports.push_back(check_ei_vs_mc());
  if (want("expected-max")) reports.push_back(check_expected_max_bound());
  if (want("counterexample")) reports.push_back(check_counterexample());
  if (want("mig-greedy-vs-exact")) reports.push_back(check_mig_greedy_vs_exact());
  if (want("probability-matching")) reports.push_back(check_probability_matching());
  if (want("eta-bound") || want("eta-event-rate") || want("variance-floor") ||
      want("mean-ref-bound")) {
    const TraceChecks tc = run_trace_checks(cfg);
    if (want("eta-bound")) reports.push_back(tc.eta_check);
    if (want("eta-event-rate")) reports.push_back(tc.eta_event_rate);
    if (want("variance-floor")) reports.push_back(tc.variance_floor);
    if (want("mean-ref-bound")) reports.push_back(tc.mean_ref_bound);
  }
  return reports;
}

}  // namespace eims::theory
