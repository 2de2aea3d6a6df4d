#ifndef BYUCOP_DIAGNOSTICS_HPP_
#define BYUCOP_DIAGNOSTICS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "byucop/bernstein.hpp"
#include "byucop/yett.hpp"

namespace byucop {

// Bivariate Gaussian mixture benchmark models.
struct GaussianComponent {
  double weight = 1.0;
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
};

struct MixtureModel {
  std::vector<GaussianComponent> components;

  void check() const;  // weights sum to 1, covariances SPD
  double joint_density(const Eigen::Vector2d& x) const;
  double marginal_pdf(int axis, double x) const;
  double marginal_cdf(int axis, double x) const;
  double marginal_quantile(int axis, double p) const;
  // Copula density c(u) = f(F1^-1(u1), F2^-1(u2)) / (f1 f2).
  double copula_density(double u1, double u2) const;
};

// The four benchmark models. M1 emulates a Clayton copula with parameter 3.
MixtureModel model_by_id(const std::string& id);

// Deterministic quasi-sample of N2(mu, sigma): chi(2 df) quantile radii at
// mid-probabilities (i - 0.5)/a1 crossed with a2 evenly spaced angles,
// mapped through the symmetric square root of sigma.
Eigen::MatrixXd perfect_sample_gaussian(const Eigen::Vector2d& mu, const Eigen::Matrix2d& sigma,
                                        int a1, int a2);

// Nearest-to-square factorization n = a1 * a2 with a1 <= a2.
std::pair<int, int> near_square_factors(int n);

// Mixture perfect sample: component c receives its largest-remainder share
// of n, drawn from its own Gaussian perfect sample.
Eigen::MatrixXd perfect_sample(const MixtureModel& model, int n);

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // zero-variance chain; ess reported as N
};

// Effective sample size via the initial-monotone-sequence truncation of the
// autocovariance pair sums.
EssResult ess(std::span<const double> chain);

// WAIC from an S x n log-likelihood matrix: -2 (lppd - p_waic), smaller is
// better. S = 1 gives a zero variance penalty (flag via the accumulator).
double waic(const Eigen::MatrixXd& loglik);

// Streaming WAIC over chain states so the S x n matrix never materializes.
class WaicAccumulator {
 public:
  explicit WaicAccumulator(std::int64_t n_obs);

  // One chain state's per-observation log-likelihood row.
  void add(std::span<const double> loglik_row);
  std::int64_t states() const { return s_; }
  double value() const;

 private:
  std::int64_t s_ = 0;
  Eigen::VectorXd max_, sumexp_;  // running log-mean-exp pieces
  Eigen::VectorXd mean_, m2_;     // Welford variance pieces
};

using DensityFn = std::function<double(std::span<const double>)>;

struct QuadratureSpec {
  int gl_nodes = 64;                  // per axis, d = 2
  std::int64_t qmc_points = 1 << 16;  // d >= 3
  std::uint64_t qmc_seed = 0x51ab9d2e;
};

// Hellinger distance sqrt(1 - int sqrt(f g)) over the unit cube, clipped to
// [0, 1].
double hellinger(const DensityFn& f, const DensityFn& g, int dim,
                 const QuadratureSpec& quad = {});

// Pointwise average of the Bernstein densities of the chain states at the
// given points (m x d). Linear in the cell masses, so this equals the
// density of the averaged state.
Eigen::VectorXd posterior_mean_density(const std::vector<Eigen::VectorXd>& states,
                                       const Degree& degree, const Eigen::MatrixXd& points);

}  // namespace byucop

#endif  // BYUCOP_DIAGNOSTICS_HPP_
