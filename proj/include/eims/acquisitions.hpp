#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

#include "eims/gp.hpp"
#include "eims/sampling.hpp"

namespace eims {

struct EmptyHistory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AcquisitionKind { EIMS, PIMS, TS, UCB, IRGPUCB, EI, EIMuMax, MES, E3I };
enum class EiMuMaxRef { GlobalMean, EvaluatedMean };

struct AcquisitionRule {
  AcquisitionKind kind = AcquisitionKind::EIMS;
  int mc_samples = 10;  // MES / E3I
  EiMuMaxRef ref = EiMuMaxRef::GlobalMean;

  std::string name() const;
  static AcquisitionRule from_name(const std::string& name);
  void validate() const;
};

struct SelectionRecord {
  int chosen = 0;  // grid row index
  std::optional<double> g_star;
  std::optional<double> eta;
  std::optional<double> schedule_value;  // beta_t, zeta_t, or nu_t
};

// EI closed form: sd * tau((mean - ref)/sd), with the sd = 0 branch
// max{mean - ref, 0}.
double ei_value(double mean, double sd, double ref);

// Options controlling how sample paths are drawn. Exact mode on small grids,
// RFF beyond the cap.
struct PathSampling {
  int exact_cap = 2000;
  int rff_features = 1024;
};

SelectionRecord select_eims(const GpPosterior& post, const Eigen::MatrixXd& grid,
                            Rng& rng, const PathSampling& ps = {});
SelectionRecord select_pims(const GpPosterior& post, const Eigen::MatrixXd& grid,
                            Rng& rng, const PathSampling& ps = {});
SelectionRecord select_ts(const GpPosterior& post, const Eigen::MatrixXd& grid,
                          Rng& rng, const PathSampling& ps = {});
SelectionRecord select_ucb(const GpPosterior& post, const Eigen::MatrixXd& grid,
                           int t, int domain_size);
SelectionRecord select_irgp_ucb(const GpPosterior& post, const Eigen::MatrixXd& grid,
                                Rng& rng, int domain_size);
SelectionRecord select_ei_classic(const GpPosterior& post, const Eigen::MatrixXd& grid,
                                  const Dataset& data);
SelectionRecord select_ei_mumax(const GpPosterior& post, const Eigen::MatrixXd& grid,
                                int t, int domain_size, EiMuMaxRef ref_kind,
                                const Eigen::MatrixXd& history);
SelectionRecord select_mes(const GpPosterior& post, const Eigen::MatrixXd& grid,
                           Rng& rng, int mc_samples, const PathSampling& ps = {});
SelectionRecord select_e3i(const GpPosterior& post, const Eigen::MatrixXd& grid,
                           Rng& rng, int mc_samples, const PathSampling& ps = {});

// GP-UCB / EI-mumax confidence schedule 2 log(|X| t^2 / sqrt(2 pi) + 1).
double ucb_schedule(int t, int domain_size);

}  // namespace eims
