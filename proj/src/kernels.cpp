#include "eims/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eims {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935274463;
constexpr double kSqrt5 = 2.2360679774997896964091737;

void check_dim(const KernelSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.lengthscales.size())
    throw std::invalid_argument("kernel: point dimension mismatch");
}

// Distance with per-dimension scaling by 1/l_j.
double scaled_dist(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2) {
  double s = 0.0;
  for (int j = 0; j < x.size(); ++j) {
    const double d = (x[j] - x2[j]) / spec.lengthscales[j];
    s += d * d;
  }
  return std::sqrt(s);
}

double eval_scaled(KernelFamily family, double r, double scale) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return scale * std::exp(-0.5 * r * r);
    case KernelFamily::Matern12:
      return scale * std::exp(-r);
    case KernelFamily::Matern32:
      return scale * (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    case KernelFamily::Matern52:
      return scale * (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * std::exp(-kSqrt5 * r);
  }
  throw std::logic_error("unknown kernel family");
}

double matern_dof(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern12: return 1.0;
    case KernelFamily::Matern32: return 3.0;
    case KernelFamily::Matern52: return 5.0;
    default: throw std::logic_error("not a Matern kernel");
  }
}
}  // namespace

const char* kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::SquaredExponential: return "se";
    case KernelFamily::Matern12: return "matern12";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
  }
  return "?";
}

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "se") return KernelFamily::SquaredExponential;
  if (name == "matern12") return KernelFamily::Matern12;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw std::invalid_argument("unknown kernel family: " + name);
}

KernelSpec KernelSpec::isotropic(KernelFamily family, int dim, double lengthscale,
                                 double output_scale) {
  KernelSpec spec;
  spec.family = family;
  spec.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  spec.output_scale = output_scale;
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (lengthscales.size() < 1)
    throw std::invalid_argument("kernel: need at least one lengthscale");
  for (int j = 0; j < lengthscales.size(); ++j)
    if (!(lengthscales[j] > 0.0))
      throw std::invalid_argument("kernel: lengthscales must be positive");
  if (!(output_scale > 0.0) || output_scale > 1.0)
    throw std::invalid_argument("kernel: output_scale must be in (0, 1]");
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2) {
  check_dim(spec, x);
  check_dim(spec, x2);
  return eval_scaled(spec.family, scaled_dist(spec, x, x2), spec.output_scale);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  if (X.cols() != spec.lengthscales.size())
    throw std::invalid_argument("kernel_matrix: dimension mismatch");
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = spec.output_scale;
    for (int j = i + 1; j < n; ++j) {
      const double v = eval_scaled(
          spec.family, scaled_dist(spec, X.row(i).transpose(), X.row(j).transpose()),
          spec.output_scale);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const Eigen::MatrixXd& A,
                             const Eigen::MatrixXd& B) {
  if (A.cols() != spec.lengthscales.size() || B.cols() != spec.lengthscales.size())
    throw std::invalid_argument("kernel_cross: dimension mismatch");
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j)
      K(i, j) = eval_scaled(
          spec.family, scaled_dist(spec, A.row(i).transpose(), B.row(j).transpose()),
          spec.output_scale);
  return K;
}

Eigen::MatrixXd spectral_sample(const KernelSpec& spec, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("spectral_sample: count must be >= 1");
  const int d = spec.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd W(count, d);
  if (spec.family == KernelFamily::SquaredExponential) {
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < d; ++j) W(i, j) = normal(rng) / spec.lengthscales[j];
    return W;
  }
  // Student-t rows: shared chi^2 mixing variable per row.
  const double dof = matern_dof(spec.family);
  std::chi_squared_distribution<double> chi2(dof);
  for (int i = 0; i < count; ++i) {
    const double mix = std::sqrt(chi2(rng) / dof);
    for (int j = 0; j < d; ++j)
      W(i, j) = normal(rng) / (spec.lengthscales[j] * mix);
  }
  return W;
}

}  // namespace eims
