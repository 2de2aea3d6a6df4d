#include "byucop/bernstein.hpp"

#include <cmath>
#include <stdexcept>

namespace byucop {

namespace {
double log_choose(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}
}  // namespace

Eigen::VectorXd beta_kernels(double z, int k) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  if (z <= 0.0) {
    out[0] = k;
    return out;
  }
  if (z >= 1.0) {
    out[k - 1] = k;
    return out;
  }
  double logz = std::log(z), log1mz = std::log1p(-z), logk = std::log(static_cast<double>(k));
  for (int nu = 1; nu <= k; ++nu) {
    out[nu - 1] = std::exp(logk + log_choose(k - 1, nu - 1) + (nu - 1) * logz +
                           (k - nu) * log1mz);
  }
  return out;
}

namespace {
// Contract the flat weight vector against per-axis kernel vectors, last axis
// first. O(total cells) per call.
double contract(const Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& kernels) {
  Eigen::VectorXd cur = w;
  for (int j = static_cast<int>(kernels.size()) - 1; j >= 0; --j) {
    const Eigen::VectorXd& kj = kernels[j];
    std::int64_t rows = cur.size() / kj.size();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        m(cur.data(), rows, kj.size());
    cur = m * kj;
  }
  return cur[0];
}
}  // namespace

double BernsteinCopula::density(std::span<const double> z) const {
  const Degree& deg = base_.degree;
  if (static_cast<int>(z.size()) != deg.dim()) {
    throw std::invalid_argument("density: point dimension mismatch");
  }
  std::vector<Eigen::VectorXd> kernels(deg.dim());
  for (int j = 0; j < deg.dim(); ++j) kernels[j] = beta_kernels(z[j], deg.k[j]);
  return std::max(0.0, contract(base_.mass, kernels));
}

double BernsteinCopula::cdf(std::span<const double> z) const {
  const Degree& deg = base_.degree;
  if (static_cast<int>(z.size()) != deg.dim()) {
    throw std::invalid_argument("cdf: point dimension mismatch");
  }
  const int d = deg.dim();
  // Cumulative grid CDF over the (k_j + 1)^d lattice, prefix-summed per axis.
  std::vector<std::int64_t> n(d);
  std::int64_t total = 1;
  for (int j = 0; j < d; ++j) {
    n[j] = deg.k[j] + 1;
    total *= n[j];
  }
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(total);
  // scatter masses at lattice index nu (1-based cells map to lattice nu).
  for (std::int64_t o = 0; o < base_.mass.size(); ++o) {
    std::int64_t rem = o;
    std::int64_t strides = 1, latoff = 0;
    for (int j = d - 1; j >= 0; --j) {
      std::int64_t cj = rem % deg.k[j];
      rem /= deg.k[j];
      latoff += (cj + 1) * strides;
      strides *= n[j];
    }
    cum[latoff] += base_.mass[o];
  }
  // prefix sums along each axis
  for (int axis = d - 1; axis >= 0; --axis) {
    std::int64_t inner = 1;
    for (int j = axis + 1; j < d; ++j) inner *= n[j];
    std::int64_t outer = total / (inner * n[axis]);
    for (std::int64_t o = 0; o < outer; ++o) {
      for (std::int64_t i = 0; i < inner; ++i) {
        std::int64_t base = o * n[axis] * inner + i;
        for (std::int64_t m = 1; m < n[axis]; ++m) {
          cum[base + m * inner] += cum[base + (m - 1) * inner];
        }
      }
    }
  }
  // Binomial kernels P_{nu,k}(z) for nu = 0..k.
  std::vector<Eigen::VectorXd> kernels(d);
  for (int j = 0; j < d; ++j) {
    int kj = deg.k[j];
    Eigen::VectorXd kern(kj + 1);
    double zj = std::min(1.0, std::max(0.0, z[j]));
    for (int nu = 0; nu <= kj; ++nu) {
      if (zj == 0.0) {
        kern[nu] = (nu == 0) ? 1.0 : 0.0;
      } else if (zj == 1.0) {
        kern[nu] = (nu == kj) ? 1.0 : 0.0;
      } else {
        kern[nu] = std::exp(log_choose(kj, nu) + nu * std::log(zj) +
                            (kj - nu) * std::log1p(-zj));
      }
    }
    kernels[j] = kern;
  }
  return std::min(1.0, std::max(0.0, contract(cum, kernels)));
}

double BernsteinCopula::marginal_density(int axis, double t) const {
  const Degree& deg = base_.degree;
  int kj = deg.k[axis];
  Eigen::VectorXd collapsed = Eigen::VectorXd::Zero(kj);
  for (int m = 1; m <= kj; ++m) collapsed[m - 1] = axis_marginal_sum(base_, axis, m);
  return collapsed.dot(beta_kernels(t, kj));
}

double BernsteinCopula::loglik(const Eigen::MatrixXd& points) const {
  double total = 0.0;
  std::vector<double> z(points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) z[j] = points(i, j);
    double dens = density(z);
    if (dens <= 0.0) return kNegInf;
    total += std::log(dens);
  }
  return total;
}

CopulaLikelihood::CopulaLikelihood(const Eigen::MatrixXd& points, const Degree& degree) {
  const int d = degree.dim();
  if (points.cols() != d) throw std::invalid_argument("likelihood: point dimension mismatch");
  const std::int64_t ncells = degree.cell_count();
  kernel_.resize(points.rows(), ncells);
  std::vector<Eigen::VectorXd> axis_kernels(d);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (int j = 0; j < d; ++j) axis_kernels[j] = beta_kernels(points(i, j), degree.k[j]);
    for (std::int64_t c = 0; c < ncells; ++c) {
      std::int64_t rem = c;
      double prod = 1.0;
      for (int j = d - 1; j >= 0; --j) {
        prod *= axis_kernels[j][rem % degree.k[j]];
        rem /= degree.k[j];
      }
      kernel_(i, c) = prod;
    }
  }
  dens_ = Eigen::VectorXd::Zero(points.rows());
  loglik_ = kNegInf;
}

double CopulaLikelihood::loglik_of(const Eigen::VectorXd& dens) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < dens.size(); ++i) {
    if (dens[i] <= 0.0) return kNegInf;
    total += std::log(dens[i]);
  }
  return total;
}

void CopulaLikelihood::set_weights(const Eigen::VectorXd& w) {
  dens_ = kernel_ * w;
  loglik_ = loglik_of(dens_);
}

double CopulaLikelihood::loglik_full(const Eigen::VectorXd& w) const {
  Eigen::VectorXd dens = kernel_ * w;
  return loglik_of(dens);
}

double CopulaLikelihood::loglik_delta(
    std::span<const std::pair<std::int64_t, double>> changes) const {
  Eigen::VectorXd dens = dens_;
  for (const auto& [cell, delta] : changes) dens += delta * kernel_.col(cell);
  return loglik_of(dens);
}

void CopulaLikelihood::accept_delta(
    std::span<const std::pair<std::int64_t, double>> changes) {
  for (const auto& [cell, delta] : changes) dens_ += delta * kernel_.col(cell);
  loglik_ = loglik_of(dens_);
}

}  // namespace byucop
