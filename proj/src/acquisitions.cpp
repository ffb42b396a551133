#include "eims/acquisitions.hpp"

#include <cmath>

#include "eims/gaussmath.hpp"

namespace eims {

namespace {
using gaussmath::std_normal_cdf;
using gaussmath::std_normal_pdf;
using gaussmath::tau;

int argmax_lowest_index(const Eigen::VectorXd& values) {
  int best = 0;
  for (int i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

SamplePath draw_path(const GpPosterior& post, const Eigen::MatrixXd& grid, Rng& rng,
                     const PathSampling& ps) {
  if (grid.rows() <= ps.exact_cap) return sample_exact(post, grid, rng);
  return sample_rff(post, ps.rff_features, rng);
}

void check_grid(const Eigen::MatrixXd& grid) {
  if (grid.rows() < 1) throw std::invalid_argument("acquisition: empty grid");
}

// MES score summand for one sampled maximum; gamma = (g* - mu)/sigma.
// For gamma << 0 the direct form is 0/0, so the log-domain Mills-ratio
// asymptotics take over.
double mes_score(double gamma) {
  if (gamma > -8.0) {
    const double cdf = std_normal_cdf(gamma);
    return gamma * std_normal_pdf(gamma) / (2.0 * cdf) - std::log(cdf);
  }
  // phi(g)/Phi(g) ~ -g * (1 + 1/g^2)^{-1} ...; log Phi(g) ~ log(phi(g)/(-g)).
  const double x = -gamma;
  const double mills = x / (1.0 - 1.0 / (x * x) + 3.0 / (x * x * x * x));
  const double log_cdf = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) - std::log(x) +
                         std::log1p(-1.0 / (x * x) + 3.0 / (x * x * x * x));
  return gamma * (-gamma) * (mills / x) / 2.0 - log_cdf;
}

SelectionRecord record_sampled(const GpPosterior& post, const Eigen::MatrixXd& grid,
                               int chosen, double g_star,
                               const Eigen::VectorXd& means, const Eigen::VectorXd& sds) {
  SelectionRecord rec;
  rec.chosen = chosen;
  rec.g_star = g_star;
  rec.eta = (g_star - means[chosen]) / sds[chosen];
  return rec;
}
}  // namespace

std::string AcquisitionRule::name() const {
  switch (kind) {
    case AcquisitionKind::EIMS: return "eims";
    case AcquisitionKind::PIMS: return "pims";
    case AcquisitionKind::TS: return "ts";
    case AcquisitionKind::UCB: return "ucb";
    case AcquisitionKind::IRGPUCB: return "irgp-ucb";
    case AcquisitionKind::EI: return "ei";
    case AcquisitionKind::EIMuMax:
      return ref == EiMuMaxRef::GlobalMean ? "ei-mumax" : "ei-mumax-evaluated";
    case AcquisitionKind::MES: return "mes";
    case AcquisitionKind::E3I: return "e3i";
  }
  return "?";
}

AcquisitionRule AcquisitionRule::from_name(const std::string& name) {
  AcquisitionRule r;
  if (name == "eims") r.kind = AcquisitionKind::EIMS;
  else if (name == "pims") r.kind = AcquisitionKind::PIMS;
  else if (name == "ts") r.kind = AcquisitionKind::TS;
  else if (name == "ucb") r.kind = AcquisitionKind::UCB;
  else if (name == "irgp-ucb") r.kind = AcquisitionKind::IRGPUCB;
  else if (name == "ei") r.kind = AcquisitionKind::EI;
  else if (name == "ei-mumax") r.kind = AcquisitionKind::EIMuMax;
  else if (name == "ei-mumax-evaluated") {
    r.kind = AcquisitionKind::EIMuMax;
    r.ref = EiMuMaxRef::EvaluatedMean;
  } else if (name == "mes") r.kind = AcquisitionKind::MES;
  else if (name == "e3i") r.kind = AcquisitionKind::E3I;
  else throw std::invalid_argument("unknown acquisition rule: " + name);
  return r;
}

void AcquisitionRule::validate() const {
  if ((kind == AcquisitionKind::MES || kind == AcquisitionKind::E3I) && mc_samples < 1)
    throw std::invalid_argument("acquisition: mc_samples must be >= 1");
}

double ei_value(double mean, double sd, double ref) {
  if (sd < 0.0) throw std::invalid_argument("ei_value: sd must be >= 0");
  if (sd == 0.0) return std::max(mean - ref, 0.0);
  return sd * tau((mean - ref) / sd);
}

double ucb_schedule(int t, int domain_size) {
  return 2.0 * std::log(domain_size * static_cast<double>(t) * t /
                            std::sqrt(2.0 * M_PI) +
                        1.0);
}

SelectionRecord select_eims(const GpPosterior& post, const Eigen::MatrixXd& grid,
                            Rng& rng, const PathSampling& ps) {
  check_grid(grid);
  const SamplePath path = draw_path(post, grid, rng, ps);
  const double g_star = path_max(path, grid).first;
  auto [means, vars] = post.predict_batch(grid);
  const Eigen::VectorXd sds = vars.array().sqrt();
  Eigen::VectorXd acq(grid.rows());
  for (int i = 0; i < grid.rows(); ++i) acq[i] = ei_value(means[i], sds[i], g_star);
  return record_sampled(post, grid, argmax_lowest_index(acq), g_star, means, sds);
}

SelectionRecord select_pims(const GpPosterior& post, const Eigen::MatrixXd& grid,
                            Rng& rng, const PathSampling& ps) {
  check_grid(grid);
  const SamplePath path = draw_path(post, grid, rng, ps);
  const double g_star = path_max(path, grid).first;
  auto [means, vars] = post.predict_batch(grid);
  const Eigen::VectorXd sds = vars.array().sqrt();
  Eigen::VectorXd acq = (means.array() - g_star) / sds.array();
  return record_sampled(post, grid, argmax_lowest_index(acq), g_star, means, sds);
}

SelectionRecord select_ts(const GpPosterior& post, const Eigen::MatrixXd& grid,
                          Rng& rng, const PathSampling& ps) {
  check_grid(grid);
  const SamplePath path = draw_path(post, grid, rng, ps);
  auto [g_star, idx] = path_max(path, grid);
  SelectionRecord rec;
  rec.chosen = idx;
  rec.g_star = g_star;
  auto [mean, var] = post.predict(grid.row(idx).transpose());
  rec.eta = (g_star - mean) / std::sqrt(var);
  return rec;
}

SelectionRecord select_ucb(const GpPosterior& post, const Eigen::MatrixXd& grid,
                           int t, int domain_size) {
  check_grid(grid);
  if (t < 1) throw std::invalid_argument("select_ucb: t must be >= 1");
  const double beta = ucb_schedule(t, domain_size);
  auto [means, vars] = post.predict_batch(grid);
  const Eigen::VectorXd acq =
      means.array() + std::sqrt(beta) * vars.array().sqrt();
  SelectionRecord rec;
  rec.chosen = argmax_lowest_index(acq);
  rec.schedule_value = beta;
  return rec;
}

SelectionRecord select_irgp_ucb(const GpPosterior& post, const Eigen::MatrixXd& grid,
                                Rng& rng, int domain_size) {
  check_grid(grid);
  if (domain_size < 1) throw std::invalid_argument("select_irgp_ucb: domain_size >= 1");
  std::exponential_distribution<double> expo(0.5);  // rate 1/2, mean 2
  const double zeta = 2.0 * std::log(domain_size / 2.0) + expo(rng);
  auto [means, vars] = post.predict_batch(grid);
  const Eigen::VectorXd acq =
      means.array() + std::sqrt(zeta) * vars.array().sqrt();
  SelectionRecord rec;
  rec.chosen = argmax_lowest_index(acq);
  rec.schedule_value = zeta;
  return rec;
}

SelectionRecord select_ei_classic(const GpPosterior& post, const Eigen::MatrixXd& grid,
                                  const Dataset& data) {
  check_grid(grid);
  if (data.size() == 0) throw EmptyHistory("select_ei_classic: no observations");
  const double y_max = data.y.maxCoeff();
  auto [means, vars] = post.predict_batch(grid);
  Eigen::VectorXd acq(grid.rows());
  for (int i = 0; i < grid.rows(); ++i)
    acq[i] = ei_value(means[i], std::sqrt(vars[i]), y_max);
  SelectionRecord rec;
  rec.chosen = argmax_lowest_index(acq);
  return rec;
}

SelectionRecord select_ei_mumax(const GpPosterior& post, const Eigen::MatrixXd& grid,
                                int t, int domain_size, EiMuMaxRef ref_kind,
                                const Eigen::MatrixXd& history) {
  check_grid(grid);
  if (t < 1) throw std::invalid_argument("select_ei_mumax: t must be >= 1");
  const double nu = ucb_schedule(t, domain_size);
  auto [means, vars] = post.predict_batch(grid);
  double ref = 0.0;
  if (ref_kind == EiMuMaxRef::GlobalMean) {
    ref = means.size() > 0 ? means.maxCoeff() : 0.0;
  } else if (history.rows() > 0) {
    ref = post.predict_batch(history).first.maxCoeff();
  }
  const double scale = std::sqrt(nu);
  Eigen::VectorXd acq(grid.rows());
  for (int i = 0; i < grid.rows(); ++i)
    acq[i] = ei_value(means[i], scale * std::sqrt(vars[i]), ref);
  SelectionRecord rec;
  rec.chosen = argmax_lowest_index(acq);
  rec.schedule_value = nu;
  return rec;
}

SelectionRecord select_mes(const GpPosterior& post, const Eigen::MatrixXd& grid,
                           Rng& rng, int mc_samples, const PathSampling& ps) {
  check_grid(grid);
  if (mc_samples < 1) throw std::invalid_argument("select_mes: mc_samples >= 1");
  auto [means, vars] = post.predict_batch(grid);
  const Eigen::VectorXd sds = vars.array().sqrt();
  Eigen::VectorXd acq = Eigen::VectorXd::Zero(grid.rows());
  for (int s = 0; s < mc_samples; ++s) {
    const SamplePath path = draw_path(post, grid, rng, ps);
    const double g_star = path_max(path, grid).first;
    for (int i = 0; i < grid.rows(); ++i)
      acq[i] += mes_score((g_star - means[i]) / sds[i]);
  }
  acq /= mc_samples;
  SelectionRecord rec;
  rec.chosen = argmax_lowest_index(acq);
  return rec;
}

SelectionRecord select_e3i(const GpPosterior& post, const Eigen::MatrixXd& grid,
                           Rng& rng, int mc_samples, const PathSampling& ps) {
  check_grid(grid);
  if (mc_samples < 1) throw std::invalid_argument("select_e3i: mc_samples >= 1");
  auto [means, vars] = post.predict_batch(grid);
  const Eigen::VectorXd sds = vars.array().sqrt();
  Eigen::VectorXd acq = Eigen::VectorXd::Zero(grid.rows());
  double last_g_star = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    const SamplePath path = draw_path(post, grid, rng, ps);
    last_g_star = path_max(path, grid).first;
    for (int i = 0; i < grid.rows(); ++i)
      acq[i] += ei_value(means[i], sds[i], last_g_star);
  }
  acq /= mc_samples;
  const int chosen = argmax_lowest_index(acq);
  if (mc_samples == 1)
    return record_sampled(post, grid, chosen, last_g_star, means, sds);
  SelectionRecord rec;
  rec.chosen = chosen;
  return rec;
}

}  // namespace eims
