#ifndef BYUCOP_BERNSTEIN_HPP_
#define BYUCOP_BERNSTEIN_HPP_

#include <Eigen/Dense>
#include <limits>
#include <span>

#include "byucop/yett.hpp"

namespace byucop {

// Beta-mixture smoothing of a yett-uniform copula. Holds a copy of the base
// cell masses; evaluation is pure.
class BernsteinCopula {
 public:
  explicit BernsteinCopula(YettCopula base) : base_(std::move(base)) {}

  const YettCopula& base() const { return base_; }
  const Degree& degree() const { return base_.degree; }

  // Mixture density sum_nu W_nu prod_j Beta(z_j | nu_j, k_j - nu_j + 1).
  double density(std::span<const double> z) const;
  double cdf(std::span<const double> z) const;
  // Analytically 1; evaluated by collapsing W, as a structural self-check.
  double marginal_density(int axis, double t) const;
  // Sum of log densities over the rows of points (n x d). A zero density
  // yields -inf.
  double loglik(const Eigen::MatrixXd& points) const;

 private:
  YettCopula base_;
};

// Beta kernel values Beta(z | nu, k - nu + 1) for nu = 1..k. Computed via
// log-gamma; boundary handled by the limit convention (z = 0 -> only nu = 1
// survives with value k, z = 1 symmetric).
Eigen::VectorXd beta_kernels(double z, int k);

// Per-point mixture-kernel cache for repeated likelihood evaluation over a
// fixed point set. kernel()(i, c) is the product of beta kernels of point i
// at flat cell c, so the density vector is kernel() * W. This contraction is
// the sampler's inner loop.
class CopulaLikelihood {
 public:
  CopulaLikelihood(const Eigen::MatrixXd& points, const Degree& degree);

  // Full recompute of per-point densities and the cached log-likelihood.
  void set_weights(const Eigen::VectorXd& w);
  double loglik() const { return loglik_; }

  // Log-likelihood of w without mutating the cache.
  double loglik_full(const Eigen::VectorXd& w) const;
  // Log-likelihood after sparse cell changes {offset, delta} to the current
  // weights; call accept_delta with the same changes to commit.
  double loglik_delta(std::span<const std::pair<std::int64_t, double>> changes) const;
  void accept_delta(std::span<const std::pair<std::int64_t, double>> changes);

  std::int64_t n() const { return kernel_.rows(); }
  const Eigen::MatrixXd& kernel() const { return kernel_; }

 private:
  double loglik_of(const Eigen::VectorXd& dens) const;
  Eigen::MatrixXd kernel_;
  Eigen::VectorXd dens_;
  double loglik_ = 0.0;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace byucop

#endif  // BYUCOP_BERNSTEIN_HPP_
