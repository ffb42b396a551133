#include "eims/loop.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace eims {

namespace {
enum Stream : std::uint64_t { kInitStream = 1, kNoiseStream = 2, kAcqStream = 3 };

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  return fnv1a(reinterpret_cast<const unsigned char*>(s.data()), s.size());
}
}  // namespace

Objective Objective::from_values(Eigen::MatrixXd grid, Eigen::VectorXd values) {
  if (grid.rows() != values.size())
    throw std::invalid_argument("Objective: grid/value size mismatch");
  Objective obj;
  obj.grid = std::move(grid);
  obj.values = std::move(values);
  obj.f_star = obj.values.maxCoeff(&obj.argmax_index);
  return obj;
}

std::string Objective::fingerprint() const {
  const std::uint64_t h = fnv1a(
      reinterpret_cast<const unsigned char*>(values.data()),
      static_cast<std::size_t>(values.size()) * sizeof(double));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

double observe(const Objective& obj, int index, double noise_sd, Rng& rng) {
  if (index < 0 || index >= obj.values.size())
    throw std::out_of_range("observe: index out of range");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("observe: noise_sd must be > 0");
  std::normal_distribution<double> normal(0.0, 1.0);
  return obj.values[index] + noise_sd * normal(rng);
}

int recommend(const GpPosterior& post, const Eigen::MatrixXd& grid) {
  if (grid.rows() < 1) throw std::invalid_argument("recommend: empty grid");
  const Eigen::VectorXd means = post.predict_batch(grid).first;
  int best = 0;
  for (int i = 1; i < means.size(); ++i)
    if (means[i] > means[best]) best = i;
  return best;
}

TrialTrace run_trial(const AcquisitionRule& rule, const Objective& obj,
                     const KernelSpec& kernel, double noise_var, int T,
                     int init_count, std::uint64_t seed,
                     const TrialOptions& options) {
  if (T < 1) throw std::invalid_argument("run_trial: T must be >= 1");
  if (init_count < 0) throw std::invalid_argument("run_trial: init_count must be >= 0");
  rule.validate();
  const int m = static_cast<int>(obj.grid.rows());
  const int d = static_cast<int>(obj.grid.cols());
  const double noise_sd = std::sqrt(noise_var);

  TrialTrace trace;
  trace.rule_name = rule.name();
  trace.objective_fingerprint = obj.fingerprint();
  trace.seed = seed;
  trace.init_count = init_count;

  Rng noise_rng = make_rng(seed, {kNoiseStream});
  Rng acq_rng = make_rng(seed, {kAcqStream, hash_string(rule.name())});

  // Initial design: Sobol snapped onto the grid, observed with noise.
  Dataset data;
  data.X.resize(init_count, d);
  data.y.resize(init_count);
  if (init_count > 0) {
    const SobolDesign design = sobol_init(d, init_count, derive_seed(seed, {kInitStream}));
    const std::vector<int> idx = snap_to_grid(design, obj.grid);
    for (int i = 0; i < init_count; ++i) {
      data.X.row(i) = obj.grid.row(idx[i]);
      data.y[i] = observe(obj, idx[i], noise_sd, noise_rng);
      trace.init_indices.push_back(idx[i]);
      trace.init_f.push_back(obj.values[idx[i]]);
    }
  }

  GpPosterior post = GpPosterior::fit(kernel, data, noise_var);
  double cum_regret = 0.0;
  Eigen::MatrixXd history = data.X;

  for (int t = 1; t <= T; ++t) {
    SelectionRecord rec;
    switch (rule.kind) {
      case AcquisitionKind::EIMS:
        rec = select_eims(post, obj.grid, acq_rng, options.path_sampling);
        break;
      case AcquisitionKind::PIMS:
        rec = select_pims(post, obj.grid, acq_rng, options.path_sampling);
        break;
      case AcquisitionKind::TS:
        rec = select_ts(post, obj.grid, acq_rng, options.path_sampling);
        break;
      case AcquisitionKind::UCB:
        rec = select_ucb(post, obj.grid, t, m);
        break;
      case AcquisitionKind::IRGPUCB:
        rec = select_irgp_ucb(post, obj.grid, acq_rng, m);
        break;
      case AcquisitionKind::EI:
        rec = select_ei_classic(post, obj.grid, post.data());
        break;
      case AcquisitionKind::EIMuMax:
        rec = select_ei_mumax(post, obj.grid, t, m, rule.ref, history);
        break;
      case AcquisitionKind::MES:
        rec = select_mes(post, obj.grid, acq_rng, rule.mc_samples, options.path_sampling);
        break;
      case AcquisitionKind::E3I:
        rec = select_e3i(post, obj.grid, acq_rng, rule.mc_samples, options.path_sampling);
        break;
    }

    if (options.observer) {
      auto [means, vars] = post.predict_batch(obj.grid);
      options.observer(t, post.data().size(), means, vars.array().sqrt(), rec);
    }

    const double y = observe(obj, rec.chosen, noise_sd, noise_rng);
    post = post.extend(obj.grid.row(rec.chosen).transpose(), y);
    history.conservativeResize(history.rows() + 1, d);
    history.row(history.rows() - 1) = obj.grid.row(rec.chosen);

    cum_regret += obj.f_star - obj.values[rec.chosen];
    const int rec_idx = recommend(post, obj.grid);

    IterationRecord it;
    it.t = t;
    it.chosen_index = rec.chosen;
    it.y = y;
    it.f = obj.values[rec.chosen];
    it.g_star = rec.g_star;
    it.eta = rec.eta;
    it.schedule_value = rec.schedule_value;
    it.simple_regret = obj.f_star - obj.values[rec_idx];
    it.cum_regret = cum_regret;
    trace.iterations.push_back(it);
  }
  return trace;
}

}  // namespace eims
