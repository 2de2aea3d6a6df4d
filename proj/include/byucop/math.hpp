#ifndef BYUCOP_MATH_HPP_
#define BYUCOP_MATH_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace byucop {

// Standard normal pdf, cdf, and quantile.
double norm_pdf(double z);
double norm_cdf(double z);
double norm_quantile(double p);

// Bivariate standard normal CDF P(X <= h, Y <= k) with correlation rho.
// Genz's rewrite of the Drezner-Wesolowsky algorithm, abs error < 1e-14.
double bvn_cdf(double h, double k, double rho);

// Regularized incomplete gamma P(a, x), lower tail.
double gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussLegendre gauss_legendre(int n);

double log_sum_exp(std::span<const double> v);

// Deterministic counter-seeded generator (xoshiro256++ seeded via splitmix64).
// All variate draws go through this class so runs replay exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                    // U(0,1), 53-bit mantissa, never 0 or 1
  double uniform(double lo, double hi);
  double normal();                     // inverse-CDF method
  double truncated_normal(double mu, double sigma, double lo, double hi);
  // Uniform integer in [0, n).
  std::int64_t uniform_int(std::int64_t n);
  // Independent stream for chain i; deterministic in (seed, i).
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

// Fisher-Yates shuffle of 0..n-1.
std::vector<int> random_permutation(int n, Rng& rng);

}  // namespace byucop

#endif  // BYUCOP_MATH_HPP_
