#include "byucop/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace byucop {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kClampLo = 1e-12;
constexpr double kClampHi = 1.0 - 1e-12;

double gauss_logpdf(double x, double mu, double sigma) {
  double z = (x - mu) / sigma;
  return -0.5 * (kLog2Pi + z * z) - std::log(sigma);
}
}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "gaussian" || name == "normal") return Family::Gaussian;
  if (name == "lognormal") return Family::LogNormal;
  if (name == "gamma") return Family::Gamma;
  if (name == "beta") return Family::Beta;
  if (name == "gaussmix2") return Family::GaussMix2;
  throw std::invalid_argument("unknown marginal family: " + name);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::LogNormal: return "lognormal";
    case Family::Gamma: return "gamma";
    case Family::Beta: return "beta";
    case Family::GaussMix2: return "gaussmix2";
  }
  return "?";
}

int family_param_count(Family f) { return f == Family::GaussMix2 ? 4 : 2; }

bool family_in_support(Family f, const Eigen::VectorXd& theta) {
  switch (f) {
    case Family::Gaussian: return theta[1] > 0.0;
    case Family::LogNormal: return theta[1] > 0.0;
    case Family::Gamma: return theta[0] > 0.0 && theta[1] > 0.0;
    case Family::Beta: return theta[0] > 0.0 && theta[1] > 0.0;
    case Family::GaussMix2: return theta[1] > 0.0 && theta[3] > 0.0;
  }
  return false;
}

double family_logpdf(Family f, const Eigen::VectorXd& theta, double x) {
  switch (f) {
    case Family::Gaussian:
      return gauss_logpdf(x, theta[0], theta[1]);
    case Family::LogNormal:
      if (x <= 0.0) return kNegInf;
      return gauss_logpdf(std::log(x), theta[0], theta[1]) - std::log(x);
    case Family::Gamma: {
      if (x <= 0.0) return kNegInf;
      double a = theta[0], s = theta[1];
      return (a - 1.0) * std::log(x) - x / s - a * std::log(s) - std::lgamma(a);
    }
    case Family::Beta: {
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      double a = theta[0], b = theta[1];
      double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
      return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta;
    }
    case Family::GaussMix2: {
      double l1 = gauss_logpdf(x, theta[0], theta[1]);
      double l2 = gauss_logpdf(x, theta[2], theta[3]);
      double m = std::max(l1, l2);
      return m + std::log(0.5 * std::exp(l1 - m) + 0.5 * std::exp(l2 - m));
    }
  }
  return kNegInf;
}

double family_cdf(Family f, const Eigen::VectorXd& theta, double x) {
  switch (f) {
    case Family::Gaussian:
      return norm_cdf((x - theta[0]) / theta[1]);
    case Family::LogNormal:
      if (x <= 0.0) return 0.0;
      return norm_cdf((std::log(x) - theta[0]) / theta[1]);
    case Family::Gamma:
      if (x <= 0.0) return 0.0;
      return gamma_p(theta[0], x / theta[1]);
    case Family::Beta:
      return beta_inc(theta[0], theta[1], std::min(1.0, std::max(0.0, x)));
    case Family::GaussMix2:
      return 0.5 * norm_cdf((x - theta[0]) / theta[1]) +
             0.5 * norm_cdf((x - theta[2]) / theta[3]);
  }
  return 0.0;
}

MarginalModel MarginalModel::parametric(Family f, Eigen::VectorXd theta0) {
  if (theta0.size() != family_param_count(f)) {
    throw std::invalid_argument("marginal: wrong parameter count for family");
  }
  MarginalModel m;
  m.kind = Kind::Parametric;
  m.family = f;
  m.theta = std::move(theta0);
  if (!m.in_support()) throw std::invalid_argument("marginal: initial theta outside support");
  return m;
}

MarginalModel MarginalModel::empirical(const Eigen::VectorXd& column) {
  MarginalModel m;
  m.kind = Kind::Empirical;
  m.sorted.assign(column.data(), column.data() + column.size());
  for (double v : m.sorted) {
    if (!std::isfinite(v)) throw std::invalid_argument("marginal: non-finite sample value");
  }
  std::sort(m.sorted.begin(), m.sorted.end());
  return m;
}

double MarginalModel::cdf(double x) const {
  if (kind == Kind::Parametric) return family_cdf(family, theta, x);
  const auto n = static_cast<double>(sorted.size());
  auto lb = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
  auto ub = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
  if (lb == ub) return static_cast<double>(ub) / (n + 1.0);  // x not a sample value
  return 0.5 * static_cast<double>(lb + ub + 1) / (n + 1.0); // average rank
}

double MarginalModel::logpdf(double x) const {
  if (kind != Kind::Parametric) {
    throw std::logic_error("marginal: empirical model has no density");
  }
  return family_logpdf(family, theta, x);
}

bool MarginalModel::in_support() const {
  return kind != Kind::Parametric || family_in_support(family, theta);
}

Eigen::MatrixXd pseudo_observations(const Eigen::MatrixXd& data,
                                    const std::vector<MarginalModel>& models) {
  if (static_cast<std::size_t>(data.cols()) != models.size()) {
    throw std::invalid_argument("pseudo_observations: column/model count mismatch");
  }
  Eigen::MatrixXd u(data.rows(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      double v = models[j].cdf(data(i, j));
      u(i, j) = std::min(kClampHi, std::max(kClampLo, v));
    }
  }
  return u;
}

double marginal_energy(const Eigen::VectorXd& stacked_theta, const Eigen::MatrixXd& data,
                       const std::vector<MarginalModel>& models, const BernsteinCopula& bc) {
  std::vector<MarginalModel> cur = models;
  int pos = 0;
  for (auto& m : cur) {
    if (m.kind != MarginalModel::Kind::Parametric) continue;
    int np = m.param_count();
    m.theta = stacked_theta.segment(pos, np);
    pos += np;
    if (!m.in_support()) return std::numeric_limits<double>::infinity();
  }
  if (pos != stacked_theta.size()) {
    throw std::invalid_argument("marginal_energy: stacked parameter size mismatch");
  }
  double energy = 0.0;
  std::vector<double> z(data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const auto& m = cur[j];
      double lp = (m.kind == MarginalModel::Kind::Parametric) ? m.logpdf(data(i, j)) : 0.0;
      if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();
      energy -= lp;
      z[j] = std::min(kClampHi, std::max(kClampLo, m.cdf(data(i, j))));
    }
    double dens = bc.density(z);
    if (dens <= 0.0) return std::numeric_limits<double>::infinity();
    energy -= std::log(dens);
  }
  // flat priors on the declared supports contribute a constant
  return energy;
}

Twalk::Twalk(EnergyFn energy, SupportFn support, Eigen::VectorXd x0, Eigen::VectorXd x1,
             TwalkOptions opts)
    : energy_(std::move(energy)),
      support_(std::move(support)),
      x_(std::move(x0)),
      xp_(std::move(x1)),
      opts_(opts) {
  if (x_.size() != xp_.size() || x_.size() == 0) {
    throw std::invalid_argument("twalk: points must share a positive dimension");
  }
  if ((x_ - xp_).cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("twalk: starting points must be distinct");
  }
  if (!support_(x_) || !support_(xp_)) {
    throw std::invalid_argument("twalk: starting points outside support");
  }
  ex_ = energy_(x_);
  exp_ = energy_(xp_);
}

void Twalk::refresh_energy() {
  ex_ = energy_(x_);
  exp_ = energy_(xp_);
}

bool Twalk::step(Rng& rng) {
  const auto n = x_.size();
  // moving point a with partner b
  bool move_first = rng.uniform() < 0.5;
  Eigen::VectorXd& a = move_first ? x_ : xp_;
  Eigen::VectorXd& b = move_first ? xp_ : x_;
  double& ea = move_first ? ex_ : exp_;

  double kind_u = rng.uniform();
  double pphi = std::min<double>(n, opts_.n1) / static_cast<double>(n);
  std::vector<bool> phi(n);
  int nphi = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    phi[j] = rng.uniform() < pphi;
    if (phi[j]) ++nphi;
  }
  if (nphi == 0) return false;

  Eigen::VectorXd y = a;
  double log_hastings = 0.0;
  if (kind_u < opts_.prob_traverse) {
    // traverse: reflect through the partner with random scale beta
    double at = opts_.at, beta;
    if (rng.uniform() < (at - 1.0) / (2.0 * at)) {
      beta = std::exp(std::log(rng.uniform()) / (at + 1.0));
    } else {
      beta = std::exp(std::log(rng.uniform()) / (1.0 - at));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (phi[j]) y[j] = b[j] + beta * (b[j] - a[j]);
    }
    log_hastings = (nphi - 2.0) * std::log(beta);
  } else if (kind_u < opts_.prob_traverse + opts_.prob_walk) {
    double aw = opts_.aw;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!phi[j]) continue;
      double u = rng.uniform();
      double z = (aw / (1.0 + aw)) * (-1.0 + 2.0 * u + aw * u * u);
      y[j] = a[j] + (a[j] - b[j]) * z;
    }
    log_hastings = 0.0;
  } else {
    bool blow = kind_u < opts_.prob_traverse + opts_.prob_walk + opts_.prob_blow;
    double sigma = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (phi[j]) sigma = std::max(sigma, std::fabs(b[j] - a[j]));
    }
    if (sigma <= 0.0) return false;
    auto g_blow = [&](const Eigen::VectorXd& h, const Eigen::VectorXd& center, double s) {
      double quad = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!phi[j]) continue;
        double diff = h[j] - center[j];
        quad += diff * diff;
      }
      return 0.5 * nphi * kLog2Pi + nphi * std::log(s) + 0.5 * quad / (s * s);
    };
    if (blow) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (phi[j]) y[j] = b[j] + sigma * rng.normal();
      }
      double sigma_rev = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (phi[j]) sigma_rev = std::max(sigma_rev, std::fabs(b[j] - y[j]));
      }
      if (sigma_rev <= 0.0) return false;
      log_hastings = g_blow(a, b, sigma_rev) - g_blow(y, b, sigma);
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (phi[j]) y[j] = a[j] + (sigma / 3.0) * rng.normal();
      }
      double sigma_rev = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (phi[j]) sigma_rev = std::max(sigma_rev, std::fabs(b[j] - y[j]));
      }
      if (sigma_rev <= 0.0) return false;
      log_hastings = g_blow(a, y, sigma_rev / 3.0) - g_blow(y, a, sigma / 3.0);
    }
  }

  if (!support_(y)) return false;
  double ey = energy_(y);
  if (!std::isfinite(ey)) return false;
  double log_accept = (ea - ey) + log_hastings;
  if (std::log(rng.uniform()) < log_accept) {
    a = y;
    ea = ey;
    return true;
  }
  return false;
}

}  // namespace byucop
