#ifndef BYUCOP_CENTERING_HPP_
#define BYUCOP_CENTERING_HPP_

#include <Eigen/Dense>
#include <span>

#include "byucop/yett.hpp"

namespace byucop {

// Symmetric, unit-diagonal, positive semidefinite.
struct CorrelationMatrix {
  Eigen::MatrixXd R;

  int dim() const { return static_cast<int>(R.rows()); }
};

void validate(const CorrelationMatrix& r, double tol = 1e-9);
double least_eigenvalue(const CorrelationMatrix& r);

struct CenteringCopula {
  enum class Kind { Independence, Gaussian };
  Kind kind = Kind::Independence;
  CorrelationMatrix corr;  // Gaussian only

  static CenteringCopula make_independence() { return {}; }
  static CenteringCopula make_gaussian(CorrelationMatrix r);
};

struct ProjectionOptions {
  // Total randomized-QMC points for d > 2 cell probabilities.
  std::int64_t qmc_points = 1 << 16;
  std::uint64_t qmc_seed = 0x9e3779b9;
  int sinkhorn_iterations = 50;
};

// Cell probabilities of the centering copula on the degree-k grid. For a
// Gaussian centering with d = 2 these come from the bivariate normal CDF;
// for d > 2 from a shared QMC sample followed by alternating per-axis
// renormalization so the result is a valid yett copula.
YettCopula project_to_yett(const CenteringCopula& g0, const Degree& degree,
                           const ProjectionOptions& opts = {});

// Gaussian copula density at a point of pseudo-observations u in (0,1)^d.
double gaussian_copula_density(const CorrelationMatrix& r, std::span<const double> u);

}  // namespace byucop

#endif  // BYUCOP_CENTERING_HPP_
