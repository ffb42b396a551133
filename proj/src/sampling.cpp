#include "eims/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace eims {

namespace {

Eigen::VectorXd standard_normal_vec(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

// Sobol direction-number parameters (degree, coefficient a, initial m values)
// for dimensions 2..21; dimension 1 is the van der Corput sequence.
struct SobolParams {
  int degree;
  unsigned a;
  unsigned m[7];
};

constexpr SobolParams kSobolTable[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 3, 25, 13}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
};

constexpr int kSobolBits = 32;
constexpr int kSobolMaxDim = 1 + static_cast<int>(sizeof(kSobolTable) / sizeof(SobolParams));

// Direction numbers v_k (k = 0..bits-1) for one dimension, scaled to 32 bits.
std::vector<std::uint32_t> direction_numbers(int dim_index) {
  std::vector<std::uint32_t> v(kSobolBits);
  if (dim_index == 0) {
    for (int k = 0; k < kSobolBits; ++k) v[k] = 1u << (31 - k);
    return v;
  }
  const SobolParams& p = kSobolTable[dim_index - 1];
  const int s = p.degree;
  std::vector<std::uint32_t> m(kSobolBits);
  for (int k = 0; k < s; ++k) m[k] = p.m[k];
  for (int k = s; k < kSobolBits; ++k) {
    std::uint32_t val = m[k - s] ^ (m[k - s] << s);
    for (int i = 1; i < s; ++i)
      if ((p.a >> (s - 1 - i)) & 1u) val ^= m[k - i] << i;
    m[k] = val;
  }
  for (int k = 0; k < kSobolBits; ++k) v[k] = m[k] << (31 - k);
  return v;
}

}  // namespace

double SamplePath::eval(const Eigen::VectorXd& x) const {
  if (exact) throw std::logic_error("SamplePath::eval: exact paths are table-only");
  const Eigen::VectorXd proj = frequencies * x + phases;
  double s = 0.0;
  for (int i = 0; i < proj.size(); ++i) s += weights[i] * std::cos(proj[i]);
  return feature_coef * s;
}

SamplePath sample_exact(const GpPosterior& post, const Eigen::MatrixXd& grid, Rng& rng) {
  const int m = static_cast<int>(grid.rows());
  if (m < 1) throw std::invalid_argument("sample_exact: empty grid");
  const Eigen::VectorXd means = post.predict_batch(grid).first;
  Eigen::MatrixXd C = post.posterior_cov(grid);
  C.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("sample_exact: grid covariance factorization failed");
  SamplePath path;
  path.exact = true;
  path.table = means + Eigen::MatrixXd(llt.matrixL()) * standard_normal_vec(m, rng);
  return path;
}

SamplePath sample_rff(const GpPosterior& post, int feature_count, Rng& rng) {
  if (feature_count < 1)
    throw std::invalid_argument("sample_rff: feature_count must be >= 1");
  const int D = feature_count;
  const KernelSpec& kernel = post.kernel();
  SamplePath path;
  path.exact = false;
  path.frequencies = spectral_sample(kernel, D, rng);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
  path.phases.resize(D);
  for (int i = 0; i < D; ++i) path.phases[i] = uni(rng);
  path.feature_coef = std::sqrt(2.0 * kernel.output_scale / D);

  const int t = post.data().size();
  if (t == 0) {
    path.weights = standard_normal_vec(D, rng);
    return path;
  }
  // Phi: D x t feature matrix of the training inputs.
  Eigen::MatrixXd Phi = path.frequencies * post.data().X.transpose();
  Phi.colwise() += path.phases;
  Phi = path.feature_coef * Phi.array().cos();
  const double noise_var = post.noise_var();
  Eigen::MatrixXd A = (Phi * Phi.transpose()) / noise_var;
  A.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("sample_rff: weight precision factorization failed");
  const Eigen::VectorXd mean_w = llt.solve(Phi * post.data().y / noise_var);
  // Covariance A^{-1} = L^{-T} L^{-1}: draw w = mean + L^{-T} z.
  Eigen::VectorXd z = standard_normal_vec(D, rng);
  Eigen::MatrixXd L = llt.matrixL();
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(z);
  path.weights = mean_w + z;
  return path;
}

std::pair<double, int> path_max(const SamplePath& path, const Eigen::MatrixXd& grid) {
  const int m = static_cast<int>(grid.rows());
  if (m < 1) throw std::invalid_argument("path_max: empty grid");
  double best = -std::numeric_limits<double>::infinity();
  int best_idx = 0;
  for (int i = 0; i < m; ++i) {
    const double v = path.exact ? path.table[i] : path.eval(grid.row(i).transpose());
    if (v > best) {
      best = v;
      best_idx = i;
    }
  }
  return {best, best_idx};
}

SobolDesign sobol_init(int d, int n, std::uint64_t seed, bool scramble) {
  if (d < 1 || n < 1) throw std::invalid_argument("sobol_init: d and n must be >= 1");
  if (d > kSobolMaxDim)
    throw std::invalid_argument("sobol_init: unsupported dimension (direction-number table ends at " +
                                std::to_string(kSobolMaxDim) + ")");
  std::vector<std::vector<std::uint32_t>> v(d);
  for (int j = 0; j < d; ++j) v[j] = direction_numbers(j);

  std::vector<std::uint32_t> shift(d, 0);
  if (scramble) {
    Rng rng(derive_seed(seed, {0x536f626fULL}));
    std::uniform_int_distribution<std::uint32_t> bits;
    for (int j = 0; j < d; ++j) shift[j] = bits(rng);
  }

  SobolDesign design;
  design.points.resize(n, d);
  std::vector<std::uint32_t> state(d, 0);
  const double scale = std::ldexp(1.0, -32);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      // Gray-code step: flip the direction number of the lowest zero bit of i-1.
      unsigned c = 0;
      std::uint32_t value = static_cast<std::uint32_t>(i - 1);
      while (value & 1u) {
        value >>= 1;
        ++c;
      }
      for (int j = 0; j < d; ++j) state[j] ^= v[j][c];
    }
    for (int j = 0; j < d; ++j)
      design.points(i, j) = (state[j] ^ shift[j]) * scale;
  }
  return design;
}

std::vector<int> snap_to_grid(const SobolDesign& design, const Eigen::MatrixXd& grid) {
  const int n = static_cast<int>(design.points.rows());
  const int m = static_cast<int>(grid.rows());
  if (m < n) throw std::invalid_argument("snap_to_grid: grid smaller than design");
  std::vector<bool> used(m, false);
  std::vector<int> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int g = 0; g < m; ++g) {
      if (used[g]) continue;
      const double dist = (grid.row(g) - design.points.row(i)).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = g;
      }
    }
    used[best] = true;
    out.push_back(best);
  }
  return out;
}

}  // namespace eims
