#include "byucop/baseline.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "byucop/diagnostics.hpp"
#include "byucop/math.hpp"

namespace byucop {

namespace {

// Per-observation Gaussian-copula log density for the quantile rows q.
Eigen::VectorXd loglik_rows(const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("baseline: correlation matrix not positive definite");
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  Eigen::MatrixXd solved = llt.solve(q.transpose());  // d x n
  Eigen::VectorXd out(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double quad = q.row(i).dot(solved.col(i));
    out[i] = -0.5 * (logdet + quad - q.row(i).squaredNorm());
  }
  return out;
}

}  // namespace

BaselineResult fit_gaussian_copula(const Eigen::MatrixXd& pseudo, const BaselineOptions& opts) {
  const Eigen::Index n = pseudo.rows(), d = pseudo.cols();
  if (n < 2 || d < 2) throw std::invalid_argument("baseline: need n >= 2, d >= 2");
  Eigen::MatrixXd q(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) q(i, j) = norm_quantile(pseudo(i, j));
  }

  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd ll = loglik_rows(q, r);
  double ll_sum = ll.sum();

  Rng rng(opts.seed);
  WaicAccumulator acc(n);
  Eigen::MatrixXd r_sum = Eigen::MatrixXd::Zero(d, d);
  std::int64_t proposed = 0, accepted = 0, saved = 0;
  std::vector<double> row(n);

  for (std::int64_t it = 1; it <= opts.iterations; ++it) {
    int i = static_cast<int>(rng.uniform_int(d));
    int j;
    do {
      j = static_cast<int>(rng.uniform_int(d));
    } while (j == i);
    ++proposed;
    double cand = r(i, j) + opts.step * rng.normal();
    if (std::fabs(cand) < 0.9999) {
      Eigen::MatrixXd rc = r;
      rc(i, j) = rc(j, i) = cand;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rc, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() > 1e-10) {
        Eigen::VectorXd llc = loglik_rows(q, rc);
        double llc_sum = llc.sum();
        if (std::log(rng.uniform()) < llc_sum - ll_sum) {
          r = std::move(rc);
          ll = std::move(llc);
          ll_sum = llc_sum;
          ++accepted;
        }
      }
    }
    if (it > opts.burnin && (it - opts.burnin) % opts.thin == 0) {
      for (Eigen::Index o = 0; o < n; ++o) row[o] = ll[o];
      acc.add(row);
      r_sum += r;
      ++saved;
    }
  }
  if (saved == 0) throw std::runtime_error("baseline: no post-burnin states saved");

  BaselineResult res;
  res.r_mean.R = r_sum / static_cast<double>(saved);
  res.waic = acc.value();
  res.accept = proposed ? static_cast<double>(accepted) / proposed : 0.0;
  res.saved = saved;
  return res;
}

}  // namespace byucop
