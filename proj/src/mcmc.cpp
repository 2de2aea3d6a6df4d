#include "byucop/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace byucop {

namespace {
// Full cache recompute cadence; bounds incremental drift far below the 1e-9
// coherence contract.
constexpr std::int64_t kRefreshEvery = 1000;
}  // namespace

void RunConfig::check() const {
  if (iterations < 0 || burnin < 0) throw std::invalid_argument("run: negative counts");
  if (thin < 1) throw std::invalid_argument("run: thin must be >= 1");
  if (iterations > 0 && burnin >= iterations) {
    throw std::invalid_argument("run: burnin must be < iterations");
  }
  if (!(r_hr > 0.0)) throw std::invalid_argument("run: r_hr must be positive");
  if (g_subsweeps < 1) throw std::invalid_argument("run: g_subsweeps must be >= 1");
  prior.check();
}

Sampler::Sampler(const Eigen::MatrixXd& data, std::vector<MarginalModel> marginals,
                 const Degree& degree, const RunConfig& cfg)
    : cfg_(cfg), data_(data), marginals_(std::move(marginals)) {
  cfg_.check();
  check_degree(degree);
  if (data_.rows() > 0 && static_cast<std::size_t>(data_.cols()) != marginals_.size()) {
    throw std::invalid_argument("sampler: data columns do not match marginal models");
  }
  if (data_.rows() > 0 && data_.cols() != degree.dim()) {
    throw std::invalid_argument("sampler: data dimension does not match degree");
  }

  g0_ = project_to_yett(cfg_.prior.centering, degree, cfg_.projection);
  state_.g = g0_;
  if (cfg_.prior.centering.kind == CenteringCopula::Kind::Gaussian) {
    state_.r = cfg_.prior.centering.corr;
  }
  if (cfg_.prior.distance != DistanceKind::L2) adj_ = facet_adjacency(degree);

  int n_theta = 0;
  for (const auto& m : marginals_) n_theta += m.param_count();
  if (cfg_.sample_marginals && n_theta > 0) {
    state_.theta.resize(n_theta);
    int pos = 0;
    for (const auto& m : marginals_) {
      if (m.kind == MarginalModel::Kind::Parametric) {
        state_.theta.segment(pos, m.param_count()) = m.theta;
        pos += m.param_count();
      }
    }
    auto energy = [this](const Eigen::VectorXd& th) { return marginal_energy_at(th); };
    auto support = [this](const Eigen::VectorXd& th) {
      return std::isfinite(marginal_energy_at(th));
    };
    Eigen::VectorXd x1 =
        state_.theta + 1e-3 * (state_.theta.cwiseAbs() + Eigen::VectorXd::Ones(n_theta));
    twalk_ = std::make_unique<Twalk>(energy, support, state_.theta, x1, cfg_.twalk);
  }

  rebuild_likelihood();
  state_.distance = prior_distance(state_.g, g0_, adj_, cfg_.prior);
}

void Sampler::rebuild_likelihood() {
  if (data_.rows() == 0) {
    state_.loglik = 0.0;
    return;
  }
  std::vector<MarginalModel> cur = marginals_;
  if (twalk_) {
    int pos = 0;
    for (auto& m : cur) {
      if (m.kind == MarginalModel::Kind::Parametric) {
        m.theta = state_.theta.segment(pos, m.param_count());
        pos += m.param_count();
      }
    }
  }
  pseudo_ = pseudo_observations(data_, cur);
  lik_ = std::make_unique<CopulaLikelihood>(pseudo_, state_.g.degree);
  lik_->set_weights(state_.g.mass);
  state_.loglik = lik_->loglik();
}

double Sampler::marginal_energy_at(const Eigen::VectorXd& theta) const {
  return marginal_energy(theta, data_, marginals_, BernsteinCopula(state_.g));
}

bool Sampler::update_g(Rng& rng) {
  Proposal p = propose(state_.g, cfg_.proposal, rng);
  if (p.null_step) return false;
  double ll_new = state_.loglik;
  if (lik_) ll_new = lik_->loglik_delta(p.delta);
  double d_new = prior_distance(p.candidate, g0_, adj_, cfg_.prior);
  double log_r = (ll_new - state_.loglik) -
                 0.5 * cfg_.prior.alpha * (d_new - state_.distance) + p.log_hastings;
  if (std::log(rng.uniform()) >= log_r) return false;
  if (lik_) lik_->accept_delta(p.delta);
  state_.g = std::move(p.candidate);
  state_.loglik = lik_ ? lik_->loglik() : 0.0;
  state_.distance = d_new;
  if (++accepts_since_refresh_ >= kRefreshEvery) refresh_caches();
  return true;
}

bool Sampler::update_r(Rng& rng) {
  if (!state_.r) throw std::logic_error("update_r: Gaussian centering not active");
  const int d = state_.r->dim();
  const int m = d * (d - 1) / 2;
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z[i] = rng.normal();
  double xi = least_eigenvalue(*state_.r);
  double bound = xi / std::sqrt(2.0);
  double delta = rng.truncated_normal(0.0, cfg_.r_hr, -bound, bound);
  return update_r_given(delta, z, rng);
}

bool Sampler::update_r_given(double delta, const Eigen::VectorXd& z, Rng& rng) {
  const int d = state_.r->dim();
  double denom = z.squaredNorm();
  CorrelationMatrix cand = *state_.r;
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      double h = delta * z[idx++] / denom;
      cand.R(i, j) += h;
      cand.R(j, i) += h;
    }
  }
  if (least_eigenvalue(cand) <= 0.0) {
    ++nonpsd_;
    std::cerr << "update_r: candidate lost positive definiteness; rejected\n";
    return false;
  }
  YettCopula g0_cand = g0_;
  double d_new = state_.distance;
  if (delta != 0.0) {
    CenteringCopula c0 = CenteringCopula::make_gaussian(cand);
    g0_cand = project_to_yett(c0, state_.g.degree, cfg_.projection);
    d_new = prior_distance(state_.g, g0_cand, adj_, cfg_.prior);
  }
  // implied prior p(R) proportional to 1/N(R) cancels the normalizer
  double log_r = 0.5 * cfg_.prior.alpha * (state_.distance - d_new);
  if (std::log(rng.uniform()) >= log_r) return false;
  state_.r = std::move(cand);
  g0_ = std::move(g0_cand);
  state_.distance = d_new;
  return true;
}

bool Sampler::update_theta(Rng& rng) {
  if (!twalk_) throw std::logic_error("update_theta: marginals are frozen");
  twalk_->refresh_energy();  // the copula under the energy moved since last call
  Eigen::VectorXd before = twalk_->x();
  bool accepted = twalk_->step(rng);
  if ((twalk_->x() - before).cwiseAbs().maxCoeff() != 0.0) {
    state_.theta = twalk_->x();
    rebuild_likelihood();
  }
  return accepted;
}

void Sampler::refresh_caches() {
  if (lik_) {
    lik_->set_weights(state_.g.mass);
    state_.loglik = lik_->loglik();
  }
  state_.distance = prior_distance(state_.g, g0_, adj_, cfg_.prior);
  accepts_since_refresh_ = 0;
}

double Sampler::loglik_recomputed() const {
  if (!lik_) return 0.0;
  return lik_->loglik_full(state_.g.mass);
}

double Sampler::distance_recomputed() const {
  return prior_distance(state_.g, g0_, adj_, cfg_.prior);
}

void write_chain_header(std::ostream& os, const Degree& degree, bool has_r, int n_theta,
                        const std::vector<std::pair<std::string, std::string>>& config_echo) {
  os << "format " << kChainFormat << "\n";
  os << "d " << degree.dim() << "\n";
  os << "k";
  for (int kj : degree.k) os << ' ' << kj;
  os << "\n";
  os << "has_r " << (has_r ? 1 : 0) << "\n";
  os << "n_theta " << n_theta << "\n";
  for (const auto& [key, value] : config_echo) os << "cfg " << key << ' ' << value << "\n";
  os << "begin\n";
}

namespace {
void put(std::ostream& os, double v, bool first) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (!first) os << ' ';
  os << buf;
}
}  // namespace

void write_chain_record(std::ostream& os, const ChainState& s, double log_prior) {
  for (std::int64_t i = 0; i < s.g.mass.size(); ++i) put(os, s.g.mass[i], i == 0);
  if (s.r) {
    const int d = s.r->dim();
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) put(os, s.r->R(i, j), false);
    }
  }
  for (std::int64_t i = 0; i < s.theta.size(); ++i) put(os, s.theta[i], false);
  put(os, s.loglik, false);
  put(os, log_prior, false);
  os << "\n";
}

ChainFile read_chain(std::istream& is) {
  ChainFile cf;
  std::string line, key;
  bool seen_format = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "format") {
      std::string tag;
      ls >> tag;
      if (tag != kChainFormat) throw std::runtime_error("chain: unsupported format " + tag);
      seen_format = true;
    } else if (key == "d") {
      int d;
      ls >> d;
      cf.degree.k.resize(d);
    } else if (key == "k") {
      for (int& kj : cf.degree.k) ls >> kj;
    } else if (key == "has_r") {
      int v;
      ls >> v;
      cf.has_r = v != 0;
    } else if (key == "n_theta") {
      ls >> cf.n_theta;
    } else if (key == "cfg") {
      std::string ckey, cval;
      ls >> ckey;
      std::getline(ls, cval);
      if (!cval.empty() && cval.front() == ' ') cval.erase(0, 1);
      cf.config_echo.emplace_back(ckey, cval);
    } else if (key == "begin") {
      break;
    } else {
      throw std::runtime_error("chain: unexpected header line: " + line);
    }
    if (!ls) throw std::runtime_error("chain: malformed header line: " + line);
  }
  if (!seen_format || cf.degree.dim() == 0) throw std::runtime_error("chain: missing header");
  check_degree(cf.degree);

  const std::int64_t ncells = cf.degree.cell_count();
  const int d = cf.degree.dim();
  const int r_len = cf.has_r ? d * (d - 1) / 2 : 0;
  const std::int64_t want = ncells + r_len + cf.n_theta + 2;
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    vals.clear();
    double v;
    while (ls >> v) vals.push_back(v);
    if (static_cast<std::int64_t>(vals.size()) != want) {
      cf.truncated = true;  // partial trailing record: keep the readable prefix
      break;
    }
    std::int64_t p = 0;
    cf.w.emplace_back(Eigen::Map<Eigen::VectorXd>(vals.data(), ncells));
    p += ncells;
    if (r_len > 0) cf.r_upper.emplace_back(Eigen::Map<Eigen::VectorXd>(vals.data() + p, r_len));
    p += r_len;
    if (cf.n_theta > 0) {
      cf.theta.emplace_back(Eigen::Map<Eigen::VectorXd>(vals.data() + p, cf.n_theta));
    }
    p += cf.n_theta;
    cf.loglik.push_back(vals[p]);
    cf.logprior.push_back(vals[p + 1]);
  }
  return cf;
}

RunResult run(const Eigen::MatrixXd& data, std::vector<MarginalModel> marginals,
              const Degree& degree, const RunConfig& cfg, std::ostream* chain_out,
              const std::vector<std::pair<std::string, std::string>>& config_echo) {
  auto t0 = std::chrono::steady_clock::now();
  Sampler sampler(data, std::move(marginals), degree, cfg);
  Rng rng(cfg.seed);
  RunResult res;
  int n_theta = static_cast<int>(sampler.state().theta.size());
  if (chain_out) {
    write_chain_header(*chain_out, degree, sampler.has_r(), n_theta, config_echo);
  }
  for (std::int64_t it = 1; it <= cfg.iterations; ++it) {
    for (int s = 0; s < cfg.g_subsweeps; ++s) {
      ++res.g_proposed;
      if (sampler.update_g(rng)) ++res.g_accepted;
    }
    if (sampler.has_r()) {
      ++res.r_proposed;
      if (sampler.update_r(rng)) ++res.r_accepted;
    }
    if (sampler.has_theta()) {
      ++res.theta_proposed;
      if (sampler.update_theta(rng)) ++res.theta_accepted;
    }
    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      if (chain_out) {
        write_chain_record(*chain_out, sampler.state(), sampler.log_prior_value());
      }
      ++res.saved;
    }
  }
  res.r_rejected_nonpsd = sampler.nonpsd_rejections();
  res.final_state = sampler.state();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace byucop
