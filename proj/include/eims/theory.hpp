#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eims/loop.hpp"
#include "eims/synthetic.hpp"

namespace eims::theory {

// Inputs for the continuous-domain discretization constants (analysis-only;
// they never drive the algorithm).
struct ContinuousParams {
  double a = 1.0;  // >= 1
  double b = 1.0;  // > 0
  double r = 1.0;  // > 0
  int d = 1;
};

struct BoundConstants {
  double c1 = 0.0;          // 2 / log(1 + sigma^{-2})
  double beta_delta = 0.0;  // 2 log(|X| / (2 delta))
  double c2 = 0.0;          // 2 + 2 log(|X| / 2)
  double b_t_discrete = 0.0;
  std::optional<long long> m_t;
  std::optional<double> c_t;
  std::optional<double> b_t_continuous;
};

BoundConstants compute_constants(long long domain_size, double noise_var, int T,
                                 double delta,
                                 std::optional<ContinuousParams> cont = std::nullopt);

// sqrt(log((sigma^2 + t - 1)/sigma^2) + beta + sqrt(2 pi beta))
double eta_bound(int t, double noise_var, double beta);

double bcr_bound(int T, double c1, double b_t, double gamma_hat);

// Greedy variance-maximizing information-gain curve; entry t-1 holds the
// accumulated gain after t picks. A lower bound on the MIG.
std::vector<double> mig_greedy(const KernelSpec& kernel, const Eigen::MatrixXd& grid,
                               int T, double noise_var,
                               long long capacity_cap = 100000);

// Exhaustive MIG over multisets (small grids only).
double mig_exact(const KernelSpec& kernel, const Eigen::MatrixXd& grid, int T,
                 double noise_var);

// Prefix sums of the probe-point posterior variance when the same query
// point is conditioned on T times.
std::vector<double> counterexample_constant_query(const KernelSpec& kernel,
                                                  const Eigen::MatrixXd& grid,
                                                  int query_index, int probe_index,
                                                  double noise_var, int T);

// One row of the verification battery.
struct CheckReport {
  std::string name;
  std::string statement;
  long long cases = 0;
  long long violations = 0;
  double worst_margin = 0.0;  // smallest slack seen; negative = violation
};

// Desk-scale configuration shared by the trace-based checks.
struct DeskConfig {
  int d = 2;
  int levels = 20;           // {0, 1/levels, ...} -> |X| = levels^d
  double lengthscale = 0.2;
  double noise_sd = 0.1;
  int horizon = 100;
  int trials = 16;
  double delta = 0.05;
  std::uint64_t master_seed = 20240901;
};

// Closed-form / grid checks (fast, deterministic).
CheckReport check_q_bound(int grid_points = 10000);
CheckReport check_tau_lower_bound(int grid_points = 10000);
CheckReport check_tau_identity(int grid_points = 16001);
CheckReport check_tau_monotonic(int grid_points = 16001);
CheckReport check_ei_sandwich(int tuples = 10000, std::uint64_t seed = 7);
CheckReport check_ei_vs_mc(int tuples = 50, int samples = 1000000,
                           std::uint64_t seed = 11);
CheckReport check_expected_max_bound(std::uint64_t seed = 13, int draws = 10000);
CheckReport check_counterexample();
CheckReport check_mig_greedy_vs_exact(std::uint64_t seed = 17, int kernels = 20);
CheckReport check_probability_matching(std::uint64_t seed = 19, int draws = 10000);

// Trace-based checks; run instrumented EIMS / EI-mumax trials at desk scale.
struct TraceChecks {
  CheckReport eta_check;       // implication violations must be 0
  CheckReport eta_event_rate;  // event frequency >= 1 - delta expected
  CheckReport variance_floor;
  CheckReport mean_ref_bound;
  double mean_cum_regret_eims = 0.0;  // mean over trials at T (for the BCR check)
};
TraceChecks run_trace_checks(const DeskConfig& cfg);

// Full battery; `filter` selects a single check by name when non-empty.
std::vector<CheckReport> run_verify_battery(const std::string& filter = "",
                                            const DeskConfig& cfg = {});

}  // namespace eims::theory
