#pragma once

#include <Eigen/Dense>

#include "eims/rng.hpp"

namespace eims {

enum class KernelFamily { SquaredExponential, Matern12, Matern32, Matern52 };

const char* kernel_family_name(KernelFamily f);
KernelFamily kernel_family_from_name(const std::string& name);

// Stationary covariance with per-dimension lengthscales. output_scale is the
// prior variance k(x, x); kept in (0, 1] so the regret constants apply.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  Eigen::VectorXd lengthscales;
  double output_scale = 1.0;

  static KernelSpec isotropic(KernelFamily family, int dim, double lengthscale,
                              double output_scale = 1.0);

  int dim() const { return static_cast<int>(lengthscales.size()); }
  void validate() const;  // throws std::invalid_argument on bad fields
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2);

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);

// Cross-covariance matrix K(A, B), |A| x |B|.
Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const Eigen::MatrixXd& A,
                             const Eigen::MatrixXd& B);

// Rows drawn from the kernel's spectral density. SE: Gaussian with per-dim
// sd 1/l_j. Matern-nu: multivariate Student-t with 2*nu dof scaled by 1/l_j.
Eigen::MatrixXd spectral_sample(const KernelSpec& spec, int count, Rng& rng);

}  // namespace eims
