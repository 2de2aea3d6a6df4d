#ifndef BYUCOP_BASELINE_HPP_
#define BYUCOP_BASELINE_HPP_

#include <Eigen/Dense>
#include <cstdint>

#include "byucop/centering.hpp"

namespace byucop {

// Parametric Gaussian-copula reference fit on pseudo-observations: flat
// prior over valid correlation matrices, random-walk Metropolis on one
// off-diagonal entry per step with PSD rejection.
struct BaselineOptions {
  std::int64_t iterations = 20000;
  std::int64_t burnin = 2000;
  std::int64_t thin = 10;
  std::uint64_t seed = 1;
  double step = 0.02;  // random-walk scale per entry
};

struct BaselineResult {
  CorrelationMatrix r_mean;
  double waic = 0.0;
  double accept = 0.0;
  std::int64_t saved = 0;
};

BaselineResult fit_gaussian_copula(const Eigen::MatrixXd& pseudo, const BaselineOptions& opts);

}  // namespace byucop

#endif  // BYUCOP_BASELINE_HPP_
