#include "byucop/centering.hpp"

#include <cmath>
#include <stdexcept>

#include "byucop/math.hpp"

namespace byucop {

void validate(const CorrelationMatrix& r, double tol) {
  const auto& m = r.R;
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw std::invalid_argument("correlation matrix: must be square, d >= 2");
  }
  for (int i = 0; i < m.rows(); ++i) {
    if (std::fabs(m(i, i) - 1.0) > tol) {
      throw std::invalid_argument("correlation matrix: diagonal must be 1");
    }
    for (int j = 0; j < i; ++j) {
      if (std::fabs(m(i, j) - m(j, i)) > tol) {
        throw std::invalid_argument("correlation matrix: not symmetric");
      }
    }
  }
  if (least_eigenvalue(r) < -tol) {
    throw std::invalid_argument("correlation matrix: not positive semidefinite");
  }
}

double least_eigenvalue(const CorrelationMatrix& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.R, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CenteringCopula CenteringCopula::make_gaussian(CorrelationMatrix r) {
  validate(r);
  CenteringCopula g0;
  g0.kind = Kind::Gaussian;
  g0.corr = std::move(r);
  return g0;
}

namespace {

// Grid CDF value of the bivariate Gaussian copula at (i/k1, j/k2).
double grid_cdf2(int i, int k1, int j, int k2, double rho) {
  if (i == 0 || j == 0) return 0.0;
  double u = static_cast<double>(i) / k1;
  double v = static_cast<double>(j) / k2;
  if (i == k1 && j == k2) return 1.0;
  if (i == k1) return v;
  if (j == k2) return u;
  return bvn_cdf(norm_quantile(u), norm_quantile(v), rho);
}

// Alternating per-axis renormalization so every axis slice sums to 1/k_j.
void sinkhorn_repair(YettCopula& c, int iterations) {
  const Degree& deg = c.degree;
  for (int it = 0; it < iterations; ++it) {
    for (int axis = 0; axis < deg.dim(); ++axis) {
      std::int64_t inner = 1;
      for (int j = axis + 1; j < deg.dim(); ++j) inner *= deg.k[j];
      std::int64_t outer = deg.cell_count() / (inner * deg.k[axis]);
      for (int m = 0; m < deg.k[axis]; ++m) {
        double s = 0.0;
        for (std::int64_t o = 0; o < outer; ++o) {
          std::int64_t base = (o * deg.k[axis] + m) * inner;
          for (std::int64_t i = 0; i < inner; ++i) s += c.mass[base + i];
        }
        if (s <= 0.0) continue;
        double scale = (1.0 / deg.k[axis]) / s;
        for (std::int64_t o = 0; o < outer; ++o) {
          std::int64_t base = (o * deg.k[axis] + m) * inner;
          for (std::int64_t i = 0; i < inner; ++i) c.mass[base + i] *= scale;
        }
      }
    }
  }
}

YettCopula project_gaussian_2d(const CorrelationMatrix& r, const Degree& degree) {
  double rho = r.R(0, 1);
  int k1 = degree.k[0], k2 = degree.k[1];
  Eigen::MatrixXd grid(k1 + 1, k2 + 1);
  for (int i = 0; i <= k1; ++i) {
    for (int j = 0; j <= k2; ++j) grid(i, j) = grid_cdf2(i, k1, j, k2, rho);
  }
  YettCopula c;
  c.degree = degree;
  c.mass.resize(degree.cell_count());
  for (int i = 1; i <= k1; ++i) {
    for (int j = 1; j <= k2; ++j) {
      double m = grid(i, j) - grid(i - 1, j) - grid(i, j - 1) + grid(i - 1, j - 1);
      c.mass[(i - 1) * static_cast<std::int64_t>(k2) + (j - 1)] = std::max(0.0, m);
    }
  }
  sinkhorn_repair(c, 2);
  return c;
}

YettCopula project_gaussian_qmc(const CorrelationMatrix& r, const Degree& degree,
                                const ProjectionOptions& opts) {
  const int d = degree.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.R);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("project_to_yett: correlation matrix not PSD");
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd root = es.eigenvectors() * lam.asDiagonal();

  // Randomized Kronecker lattice: u_i = frac(shift + i * alpha), alpha from
  // square roots of primes; the shift makes the rule randomized but the seed
  // is fixed so projection is deterministic.
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  if (d > 20) throw std::invalid_argument("project_to_yett: dimension too large");
  std::vector<double> alpha(d), shift(d);
  Rng shift_rng(opts.qmc_seed);
  for (int j = 0; j < d; ++j) {
    double s = std::sqrt(static_cast<double>(primes[j]));
    alpha[j] = s - std::floor(s);
    shift[j] = shift_rng.uniform();
  }

  Eigen::VectorXd counts = Eigen::VectorXd::Constant(degree.cell_count(), 0.25);
  Eigen::VectorXd z(d), y(d);
  for (std::int64_t i = 0; i < opts.qmc_points; ++i) {
    for (int j = 0; j < d; ++j) {
      double u = shift[j] + (i + 1.0) * alpha[j];
      u -= std::floor(u);
      u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
      z[j] = norm_quantile(u);
    }
    y = root * z;
    std::int64_t off = 0;
    for (int j = 0; j < d; ++j) {
      double u = norm_cdf(y[j]);
      int cell = std::min(static_cast<int>(u * degree.k[j]), degree.k[j] - 1);
      off = off * degree.k[j] + cell;
    }
    counts[off] += 1.0;
  }
  YettCopula c;
  c.degree = degree;
  c.mass = counts / counts.sum();
  sinkhorn_repair(c, opts.sinkhorn_iterations);
  return c;
}

}  // namespace

YettCopula project_to_yett(const CenteringCopula& g0, const Degree& degree,
                           const ProjectionOptions& opts) {
  check_degree(degree);
  if (g0.kind == CenteringCopula::Kind::Independence) return independence(degree);
  if (g0.corr.dim() != degree.dim()) {
    throw std::invalid_argument("project_to_yett: dimension mismatch");
  }
  if (degree.dim() == 2) return project_gaussian_2d(g0.corr, degree);
  return project_gaussian_qmc(g0.corr, degree, opts);
}

double gaussian_copula_density(const CorrelationMatrix& r, std::span<const double> u) {
  const int d = r.dim();
  Eigen::VectorXd x(d);
  for (int j = 0; j < d; ++j) x[j] = norm_quantile(u[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(r.R);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("gaussian_copula_density: R not positive definite");
  }
  double logdet = 0.0;
  for (int j = 0; j < d; ++j) logdet += 2.0 * std::log(llt.matrixL()(j, j));
  Eigen::VectorXd solved = llt.solve(x);
  double quad = x.dot(solved) - x.squaredNorm();
  return std::exp(-0.5 * (logdet + quad));
}

}  // namespace byucop
