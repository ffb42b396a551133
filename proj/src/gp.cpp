#include "eims/gp.hpp"

#include <cmath>

namespace eims {

namespace {
// Attempts a lower Cholesky of A; returns false if a pivot fails.
bool try_cholesky(const Eigen::MatrixXd& A, Eigen::MatrixXd& L) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  return true;
}
}  // namespace

GpPosterior::GpPosterior(KernelSpec kernel, Dataset data, double noise_var)
    : kernel_(std::move(kernel)), noise_var_(noise_var), data_(std::move(data)) {}

GpPosterior GpPosterior::fit(KernelSpec kernel, Dataset data, double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("fit: noise_var must be > 0");
  kernel.validate();
  if (data.size() > 0 && data.X.cols() != kernel.dim())
    throw std::invalid_argument("fit: dataset dimension mismatch");
  GpPosterior post(std::move(kernel), std::move(data), noise_var);
  const int n = post.data_.size();
  if (n == 0) {
    post.chol_.resize(0, 0);
    post.weights_.resize(0);
    return post;
  }
  Eigen::MatrixXd A = kernel_matrix(post.kernel_, post.data_.X);
  A.diagonal().array() += noise_var;
  if (!try_cholesky(A, post.chol_)) {
    const double jitter = 1e-10 * A.trace() / n;
    A.diagonal().array() += jitter;
    if (!try_cholesky(A, post.chol_))
      throw FactorizationError("fit: Cholesky failed even with jitter");
    post.jitter_applied_ = true;
  }
  post.weights_ = post.chol_.triangularView<Eigen::Lower>().solve(post.data_.y);
  post.chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(post.weights_);
  return post;
}

Eigen::VectorXd GpPosterior::kernel_vector(const Eigen::VectorXd& x) const {
  const int n = data_.size();
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i)
    k[i] = kernel_eval(kernel_, data_.X.row(i).transpose(), x);
  return k;
}

double GpPosterior::clamp_variance(double var) const {
  if (var >= 0.0) return var;
  const double mag = -var;
  double cur = max_clamp_.load(std::memory_order_relaxed);
  while (mag > cur &&
         !max_clamp_.compare_exchange_weak(cur, mag, std::memory_order_relaxed)) {
  }
  return 0.0;
}

std::pair<double, double> GpPosterior::predict(const Eigen::VectorXd& x) const {
  if (x.size() != kernel_.dim())
    throw std::invalid_argument("predict: point dimension mismatch");
  const double prior_var = kernel_.output_scale;
  if (data_.size() == 0) return {0.0, prior_var};
  const Eigen::VectorXd k = kernel_vector(x);
  const double mean = k.dot(weights_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = clamp_variance(prior_var - v.squaredNorm());
  return {mean, var};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GpPosterior::predict_batch(
    const Eigen::MatrixXd& X) const {
  if (X.cols() != kernel_.dim())
    throw std::invalid_argument("predict_batch: dimension mismatch");
  const int m = static_cast<int>(X.rows());
  Eigen::VectorXd means(m), vars(m);
  const double prior_var = kernel_.output_scale;
  if (data_.size() == 0) {
    means.setZero();
    vars.setConstant(prior_var);
    return {means, vars};
  }
  const Eigen::MatrixXd Kxg = kernel_cross(kernel_, data_.X, X);  // t x m
  means = Kxg.transpose() * weights_;
  const Eigen::MatrixXd V = chol_.triangularView<Eigen::Lower>().solve(Kxg);
  for (int i = 0; i < m; ++i)
    vars[i] = clamp_variance(prior_var - V.col(i).squaredNorm());
  return {means, vars};
}

Eigen::MatrixXd GpPosterior::posterior_cov(const Eigen::MatrixXd& X) const {
  if (X.cols() != kernel_.dim())
    throw std::invalid_argument("posterior_cov: dimension mismatch");
  Eigen::MatrixXd C = kernel_matrix(kernel_, X);
  if (data_.size() == 0) return C;
  const Eigen::MatrixXd Kxg = kernel_cross(kernel_, data_.X, X);
  const Eigen::MatrixXd V = chol_.triangularView<Eigen::Lower>().solve(Kxg);
  C.noalias() -= V.transpose() * V;
  return C;
}

GpPosterior GpPosterior::extend(const Eigen::VectorXd& x, double y) const {
  if (x.size() != kernel_.dim())
    throw std::invalid_argument("extend: point dimension mismatch");
  const int n = data_.size();
  Dataset aug;
  aug.X.resize(n + 1, kernel_.dim());
  aug.y.resize(n + 1);
  if (n > 0) {
    aug.X.topRows(n) = data_.X;
    aug.y.head(n) = data_.y;
  }
  aug.X.row(n) = x.transpose();
  aug.y[n] = y;

  if (n == 0) return fit(kernel_, std::move(aug), noise_var_);

  const Eigen::VectorXd k_new = kernel_vector(x);
  const Eigen::VectorXd l12 = chol_.triangularView<Eigen::Lower>().solve(k_new);
  const double pivot2 =
      kernel_.output_scale + noise_var_ - l12.squaredNorm();
  if (pivot2 < 1e-12) return fit(kernel_, std::move(aug), noise_var_);

  GpPosterior post(kernel_, std::move(aug), noise_var_);
  post.jitter_applied_ = jitter_applied_;
  post.chol_ = Eigen::MatrixXd::Zero(n + 1, n + 1);
  post.chol_.topLeftCorner(n, n) = chol_;
  post.chol_.row(n).head(n) = l12.transpose();
  post.chol_(n, n) = std::sqrt(pivot2);
  post.weights_ = post.chol_.triangularView<Eigen::Lower>().solve(post.data_.y);
  post.chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(post.weights_);
  return post;
}

}  // namespace eims
