#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <stdexcept>
#include <utility>

#include "eims/kernels.hpp"

namespace eims {

struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Eigen::MatrixXd X;  // t x d
  Eigen::VectorXd y;  // t

  Dataset() = default;
  Dataset(Eigen::MatrixXd X_, Eigen::VectorXd y_) : X(std::move(X_)), y(std::move(y_)) {
    if (X.rows() != y.size())
      throw std::invalid_argument("Dataset: row count of X must equal length of y");
  }
  int size() const { return static_cast<int>(y.size()); }
};

// Immutable fitted posterior. Holds the Cholesky factor of K + sigma^2 I and
// the weight vector alpha = (K + sigma^2 I)^{-1} y.
class GpPosterior {
 public:
  static GpPosterior fit(KernelSpec kernel, Dataset data, double noise_var);

  GpPosterior(const GpPosterior& o)
      : kernel_(o.kernel_), noise_var_(o.noise_var_), data_(o.data_), chol_(o.chol_),
        weights_(o.weights_), jitter_applied_(o.jitter_applied_),
        max_clamp_(o.max_clamp_.load()) {}
  GpPosterior(GpPosterior&& o) noexcept
      : kernel_(std::move(o.kernel_)), noise_var_(o.noise_var_),
        data_(std::move(o.data_)), chol_(std::move(o.chol_)),
        weights_(std::move(o.weights_)), jitter_applied_(o.jitter_applied_),
        max_clamp_(o.max_clamp_.load()) {}
  GpPosterior& operator=(const GpPosterior& o) {
    if (this != &o) *this = GpPosterior(o);
    return *this;
  }
  GpPosterior& operator=(GpPosterior&& o) noexcept {
    kernel_ = std::move(o.kernel_);
    noise_var_ = o.noise_var_;
    data_ = std::move(o.data_);
    chol_ = std::move(o.chol_);
    weights_ = std::move(o.weights_);
    jitter_applied_ = o.jitter_applied_;
    max_clamp_.store(o.max_clamp_.load());
    return *this;
  }

  std::pair<double, double> predict(const Eigen::VectorXd& x) const;
  std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_batch(const Eigen::MatrixXd& X) const;

  // Posterior covariance matrix on a set of query points.
  Eigen::MatrixXd posterior_cov(const Eigen::MatrixXd& X) const;

  // Rank-1 Cholesky extension; falls back to a full refit when the new
  // diagonal pivot drops below 1e-12.
  GpPosterior extend(const Eigen::VectorXd& x, double y) const;

  const KernelSpec& kernel() const { return kernel_; }
  const Dataset& data() const { return data_; }
  double noise_var() const { return noise_var_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  bool jitter_applied() const { return jitter_applied_; }

  // Largest negative-variance clamp seen by predict (roundoff diagnostic).
  double max_variance_clamp() const { return max_clamp_.load(std::memory_order_relaxed); }

 private:
  GpPosterior(KernelSpec kernel, Dataset data, double noise_var);

  Eigen::VectorXd kernel_vector(const Eigen::VectorXd& x) const;
  double clamp_variance(double var) const;

  KernelSpec kernel_;
  double noise_var_ = 1.0;
  Dataset data_;
  Eigen::MatrixXd chol_;     // lower triangular
  Eigen::VectorXd weights_;  // alpha
  bool jitter_applied_ = false;
  mutable std::atomic<double> max_clamp_{0.0};
};

}  // namespace eims
