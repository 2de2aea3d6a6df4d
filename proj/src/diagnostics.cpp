#include "byucop/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "byucop/math.hpp"

namespace byucop {

void MixtureModel::check() const {
  if (components.empty()) throw std::invalid_argument("mixture: no components");
  double wsum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
    wsum += c.weight;
    Eigen::LLT<Eigen::Matrix2d> llt(c.sigma);
    if ((c.sigma - c.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
        llt.info() != Eigen::Success) {
      throw std::invalid_argument("mixture: covariance must be symmetric positive definite");
    }
  }
  if (std::fabs(wsum - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
}

double MixtureModel::joint_density(const Eigen::Vector2d& x) const {
  double f = 0.0;
  for (const auto& c : components) {
    Eigen::Matrix2d inv = c.sigma.inverse();
    double det = c.sigma.determinant();
    Eigen::Vector2d v = x - c.mu;
    double quad = v.dot(inv * v);
    f += c.weight * std::exp(-0.5 * quad) / (2.0 * M_PI * std::sqrt(det));
  }
  return f;
}

double MixtureModel::marginal_pdf(int axis, double x) const {
  double f = 0.0;
  for (const auto& c : components) {
    double s = std::sqrt(c.sigma(axis, axis));
    f += c.weight * norm_pdf((x - c.mu[axis]) / s) / s;
  }
  return f;
}

double MixtureModel::marginal_cdf(int axis, double x) const {
  double f = 0.0;
  for (const auto& c : components) {
    double s = std::sqrt(c.sigma(axis, axis));
    f += c.weight * norm_cdf((x - c.mu[axis]) / s);
  }
  return f;
}

double MixtureModel::marginal_quantile(int axis, double p) const {
  double lo = 1e300, hi = -1e300;
  for (const auto& c : components) {
    double s = std::sqrt(c.sigma(axis, axis));
    lo = std::min(lo, c.mu[axis] - 12.0 * s);
    hi = std::max(hi, c.mu[axis] + 12.0 * s);
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (marginal_cdf(axis, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * (1.0 + std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

double MixtureModel::copula_density(double u1, double u2) const {
  double x1 = marginal_quantile(0, u1);
  double x2 = marginal_quantile(1, u2);
  double f1 = marginal_pdf(0, x1), f2 = marginal_pdf(1, x2);
  if (f1 <= 0.0 || f2 <= 0.0) return 0.0;
  return joint_density({x1, x2}) / (f1 * f2);
}

MixtureModel model_by_id(const std::string& id) {
  auto comp = [](double w, double m1, double m2, double v12) {
    GaussianComponent c;
    c.weight = w;
    c.mu << m1, m2;
    c.sigma << 1.0, v12, v12, 1.0;
    return c;
  };
  MixtureModel m;
  if (id == "M1") {
    m.components = {comp(0.4, -1.6, -1.6, 0.85), comp(0.6, 0.0, 0.0, -0.1)};
  } else if (id == "M2") {
    m.components = {comp(1.0, 0.0, 0.0, 0.5)};
  } else if (id == "M3") {
    m.components = {comp(0.5, 0.0, 0.0, 0.5), comp(0.5, 0.0, 0.0, -0.9)};
  } else if (id == "M4") {
    m.components = {comp(0.5, -1.0, -1.0, 0.0), comp(0.5, 1.0, 1.0, 0.0)};
  } else {
    throw std::invalid_argument("unknown model id: " + id);
  }
  m.check();
  return m;
}

Eigen::MatrixXd perfect_sample_gaussian(const Eigen::Vector2d& mu, const Eigen::Matrix2d& sigma,
                                        int a1, int a2) {
  if (a1 < 1 || a2 < 1) throw std::invalid_argument("perfect_sample: grid factors must be >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma);
  if (es.eigenvalues().minCoeff() <= 0.0 ||
      (sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("perfect_sample: sigma must be symmetric positive definite");
  }
  Eigen::Matrix2d u =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(a1) * a2, 2);
  Eigen::Index row = 0;
  for (int j = 0; j < a1; ++j) {
    double p = (j + 0.5) / a1;
    double q = std::sqrt(-2.0 * std::log1p(-p));  // chi(2 df) quantile
    for (int i = 0; i < a2; ++i) {
      double r = 2.0 * M_PI * i / a2;
      Eigen::Vector2d s(q * std::cos(r), q * std::sin(r));
      out.row(row++) = (mu + u * s).transpose();
    }
  }
  return out;
}

std::pair<int, int> near_square_factors(int n) {
  if (n < 1) throw std::invalid_argument("near_square_factors: n must be >= 1");
  int a = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (a > 1 && n % a != 0) --a;
  return {a, n / a};
}

Eigen::MatrixXd perfect_sample(const MixtureModel& model, int n) {
  model.check();
  if (n < 1) throw std::invalid_argument("perfect_sample: n must be >= 1");
  const auto nc = model.components.size();
  std::vector<int> counts(nc);
  std::vector<double> frac(nc);
  int assigned = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    double share = model.components[c].weight * n;
    counts[c] = static_cast<int>(std::floor(share));
    frac[c] = share - counts[c];
    assigned += counts[c];
  }
  std::vector<std::size_t> order(nc);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (int r = 0; r < n - assigned; ++r) ++counts[order[r % nc]];

  Eigen::MatrixXd out(n, 2);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    if (counts[c] == 0) continue;
    auto [a1, a2] = near_square_factors(counts[c]);
    Eigen::MatrixXd pts =
        perfect_sample_gaussian(model.components[c].mu, model.components[c].sigma, a1, a2);
    out.middleRows(row, pts.rows()) = pts;
    row += pts.rows();
  }
  return out;
}

EssResult ess(std::span<const double> chain) {
  const auto n = static_cast<std::int64_t>(chain.size());
  if (n < 10) throw std::invalid_argument("ess: chain must have length >= 10");
  double mean = 0.0;
  for (double v : chain) {
    if (!std::isfinite(v)) throw std::invalid_argument("ess: non-finite chain entry");
    mean += v;
  }
  mean /= n;
  auto gamma = [&](std::int64_t t) {
    double s = 0.0;
    for (std::int64_t i = 0; i + t < n; ++i) s += (chain[i] - mean) * (chain[i + t] - mean);
    return s / n;
  };
  double g0 = gamma(0);
  if (g0 <= 0.0) return {static_cast<double>(n), true};

  // Geyer initial monotone sequence over autocovariance pair sums.
  double sum_pairs = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = gamma(2 * m) + gamma(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    sum_pairs += pair;
    prev = pair;
  }
  double tau = 2.0 * sum_pairs / g0 - 1.0;
  tau = std::max(tau, 1e-12);
  double e = n / tau;
  e = std::min(e, static_cast<double>(n));
  return {e, false};
}

WaicAccumulator::WaicAccumulator(std::int64_t n_obs)
    : max_(Eigen::VectorXd::Constant(n_obs, -std::numeric_limits<double>::infinity())),
      sumexp_(Eigen::VectorXd::Zero(n_obs)),
      mean_(Eigen::VectorXd::Zero(n_obs)),
      m2_(Eigen::VectorXd::Zero(n_obs)) {}

void WaicAccumulator::add(std::span<const double> loglik_row) {
  if (static_cast<Eigen::Index>(loglik_row.size()) != max_.size()) {
    throw std::invalid_argument("waic: row length mismatch");
  }
  ++s_;
  for (Eigen::Index i = 0; i < max_.size(); ++i) {
    double ll = loglik_row[i];
    if (!std::isfinite(ll)) throw std::invalid_argument("waic: non-finite log-likelihood");
    if (ll > max_[i]) {
      sumexp_[i] = sumexp_[i] * std::exp(max_[i] - ll) + 1.0;
      max_[i] = ll;
    } else {
      sumexp_[i] += std::exp(ll - max_[i]);
    }
    double d = ll - mean_[i];
    mean_[i] += d / s_;
    m2_[i] += d * (ll - mean_[i]);
  }
}

double WaicAccumulator::value() const {
  if (s_ == 0) throw std::logic_error("waic: no states accumulated");
  double lppd = 0.0, p_waic = 0.0;
  for (Eigen::Index i = 0; i < max_.size(); ++i) {
    lppd += max_[i] + std::log(sumexp_[i] / s_);
    if (s_ > 1) p_waic += m2_[i] / (s_ - 1);
  }
  return -2.0 * (lppd - p_waic);
}

double waic(const Eigen::MatrixXd& loglik) {
  WaicAccumulator acc(loglik.cols());
  std::vector<double> row(loglik.cols());
  for (Eigen::Index s = 0; s < loglik.rows(); ++s) {
    for (Eigen::Index i = 0; i < loglik.cols(); ++i) row[i] = loglik(s, i);
    acc.add(row);
  }
  return acc.value();
}

double hellinger(const DensityFn& f, const DensityFn& g, int dim, const QuadratureSpec& quad) {
  if (dim < 2) throw std::invalid_argument("hellinger: dim must be >= 2");
  double integral = 0.0;
  if (dim == 2) {
    GaussLegendre gl = gauss_legendre(quad.gl_nodes);
    std::vector<double> z(2);
    for (int i = 0; i < quad.gl_nodes; ++i) {
      z[0] = 0.5 * (gl.nodes[i] + 1.0);
      double wi = 0.5 * gl.weights[i];
      for (int j = 0; j < quad.gl_nodes; ++j) {
        z[1] = 0.5 * (gl.nodes[j] + 1.0);
        double fv = std::max(0.0, f(z)), gv = std::max(0.0, g(z));
        integral += wi * 0.5 * gl.weights[j] * std::sqrt(fv * gv);
      }
    }
  } else {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dim > 12) throw std::invalid_argument("hellinger: dim too large");
    std::vector<double> alpha(dim), shift(dim), z(dim);
    Rng rng(quad.qmc_seed);
    for (int j = 0; j < dim; ++j) {
      double s = std::sqrt(static_cast<double>(primes[j]));
      alpha[j] = s - std::floor(s);
      shift[j] = rng.uniform();
    }
    for (std::int64_t i = 0; i < quad.qmc_points; ++i) {
      for (int j = 0; j < dim; ++j) {
        double v = i * alpha[j] + shift[j];
        z[j] = v - std::floor(v);
      }
      double fv = std::max(0.0, f(z)), gv = std::max(0.0, g(z));
      integral += std::sqrt(fv * gv);
    }
    integral /= static_cast<double>(quad.qmc_points);
  }
  double h2 = std::min(1.0, std::max(0.0, 1.0 - integral));
  return std::sqrt(h2);
}

Eigen::VectorXd posterior_mean_density(const std::vector<Eigen::VectorXd>& states,
                                       const Degree& degree, const Eigen::MatrixXd& points) {
  if (states.empty()) throw std::invalid_argument("posterior_mean_density: empty chain");
  YettCopula mean;
  mean.degree = degree;
  mean.mass = Eigen::VectorXd::Zero(degree.cell_count());
  for (const auto& w : states) {
    if (w.size() != mean.mass.size()) {
      throw std::invalid_argument("posterior_mean_density: state size mismatch");
    }
    mean.mass += w;
  }
  mean.mass /= static_cast<double>(states.size());
  BernsteinCopula bc(std::move(mean));
  Eigen::VectorXd out(points.rows());
  std::vector<double> z(points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) z[j] = points(i, j);
    out[i] = bc.density(z);
  }
  return out;
}

}  // namespace byucop
