#include <doctest.h>

#include <sstream>

#include "byucop/mcmc.hpp"
#include "helpers.hpp"

using namespace byucop;

namespace {

RunConfig flat_config() {
  RunConfig cfg;
  cfg.iterations = 100;
  cfg.burnin = 10;
  cfg.thin = 1;
  cfg.seed = 5;
  cfg.proposal = ProposalKind::ire(2);
  cfg.prior.distance = DistanceKind::ICAR;
  cfg.prior.alpha = 4.0;
  return cfg;
}

Eigen::MatrixXd no_data(int d) { return Eigen::MatrixXd(0, d); }

Eigen::MatrixXd toy_data(int n, Rng& rng) {
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i) {
    double a = rng.uniform();
    x(i, 0) = a;
    x(i, 1) = std::min(1.0 - 1e-6, std::max(1e-6, 0.7 * a + 0.3 * rng.uniform()));
  }
  return x;
}

}  // namespace

TEST_CASE("run config validation") {
  RunConfig cfg = flat_config();
  cfg.check();
  cfg.burnin = cfg.iterations;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = flat_config();
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = flat_config();
  cfg.r_hr = 0.0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
}

TEST_CASE("update_g acceptance near one for flat target") {
  RunConfig cfg = flat_config();
  cfg.prior.alpha = 1e-8;  // effectively flat prior, no data
  Sampler s(no_data(2), {}, {{3, 3}}, cfg);
  Rng rng(7);
  int accepted = 0;
  for (int i = 0; i < 2000; ++i) accepted += s.update_g(rng);
  CHECK(accepted > 1900);  // symmetric kernel, log r ~ 0
}

TEST_CASE("rejected step leaves state bit-identical") {
  RunConfig cfg = flat_config();
  cfg.prior.alpha = 5e4;  // sharp prior forces frequent rejection
  Sampler s(no_data(2), {}, {{3, 3}}, cfg);
  Rng rng(11);
  int rejections = 0;
  for (int i = 0; i < 500 && rejections < 50; ++i) {
    Eigen::VectorXd before = s.state().g.mass;
    double ll = s.state().loglik, dist = s.state().distance;
    if (!s.update_g(rng)) {
      ++rejections;
      CHECK((s.state().g.mass - before).cwiseAbs().maxCoeff() == 0.0);
      CHECK(s.state().loglik == ll);
      CHECK(s.state().distance == dist);
    }
  }
  CHECK(rejections >= 50);
}

TEST_CASE("cache coherence") {
  Rng data_rng(3);
  Eigen::MatrixXd u = toy_data(40, data_rng);
  RunConfig cfg = flat_config();
  std::vector<MarginalModel> models = {MarginalModel::empirical(u.col(0)),
                                       MarginalModel::empirical(u.col(1))};
  Sampler s(u, models, {{4, 4}}, cfg);
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) s.update_g(rng);
  CHECK(s.state().loglik == doctest::Approx(s.loglik_recomputed()).epsilon(1e-9));
  CHECK(s.state().distance == doctest::Approx(s.distance_recomputed()).epsilon(1e-9));
  validate(s.state().g);
}

TEST_CASE("update_r") {
  RunConfig cfg = flat_config();
  cfg.projection.qmc_points = 1 << 12;
  CorrelationMatrix r;
  r.R = Eigen::Matrix2d::Identity();
  r.R(0, 1) = r.R(1, 0) = 0.5;
  cfg.prior.centering = CenteringCopula::make_gaussian(r);
  Sampler s(no_data(2), {}, {{3, 3}}, cfg);
  Rng rng(17);

  // delta = 0 keeps R and is always accepted
  Eigen::VectorXd z(1);
  z << 0.73;
  for (int i = 0; i < 20; ++i) {
    CHECK(s.update_r_given(0.0, z, rng));
    CHECK(s.state().r->R(0, 1) == 0.5);
  }

  // a real move lands where the construction says and refreshes the caches
  double before = s.state().r->R(0, 1);
  double delta = 0.05;
  bool accepted = s.update_r_given(delta, z, rng);
  if (accepted) {
    double h = delta * z[0] / (z[0] * z[0]);
    CHECK(s.state().r->R(0, 1) == doctest::Approx(before + h).epsilon(1e-14));
    CHECK(s.state().r->R(1, 0) == s.state().r->R(0, 1));
    CHECK(s.state().distance == doctest::Approx(s.distance_recomputed()).epsilon(1e-9));
  } else {
    CHECK(s.state().r->R(0, 1) == before);
  }

  // random sweeps stay positive definite; in d = 2 the direction draw can
  // overshoot (h = delta / z), but overshoots must all be rejected
  for (int i = 0; i < 200; ++i) {
    s.update_r(rng);
    CHECK(least_eigenvalue(*s.state().r) > 0.0);
  }
}

TEST_CASE("run: bookkeeping and determinism") {
  RunConfig cfg = flat_config();
  cfg.iterations = 0;
  std::ostringstream out0;
  RunResult res0 = run(no_data(2), {}, {{3, 3}}, cfg, &out0);
  CHECK(res0.saved == 0);
  CHECK(out0.str().find("begin") != std::string::npos);

  cfg = flat_config();
  cfg.iterations = 200;
  cfg.burnin = 50;
  cfg.thin = 5;
  std::ostringstream a, b;
  RunResult ra = run(no_data(2), {}, {{3, 3}}, cfg, &a);
  RunResult rb = run(no_data(2), {}, {{3, 3}}, cfg, &b);
  CHECK(ra.saved == 30);
  CHECK(a.str() == b.str());  // fixed seed, byte-identical chains
  CHECK(ra.g_accepted == rb.g_accepted);

  std::istringstream is(a.str());
  ChainFile cf = read_chain(is);
  CHECK(cf.size() == 30);
  CHECK_FALSE(cf.truncated);
  CHECK(cf.degree == Degree{{3, 3}});
  for (const auto& w : cf.w) {
    YettCopula c;
    c.degree = cf.degree;
    c.mass = w;
    validate(c, 1e-9);
  }
  // log prior recomputes from the recorded state
  Adjacency adj = facet_adjacency(cf.degree);
  YettCopula g0 = independence(cf.degree);
  YettCopula last;
  last.degree = cf.degree;
  last.mass = cf.w.back();
  CHECK(cf.logprior.back() ==
        doctest::Approx(log_prior(last, g0, adj, cfg.prior)).epsilon(1e-9));
}

TEST_CASE("chain file: truncated record prefix") {
  RunConfig cfg = flat_config();
  cfg.iterations = 60;
  cfg.burnin = 10;
  cfg.thin = 10;
  std::ostringstream out;
  run(no_data(2), {}, {{2, 2}}, cfg, &out);
  std::string text = out.str();
  // keep only the first half of the final record line
  std::size_t last_nl = text.rfind('\n', text.size() - 2);
  std::string cut = text.substr(0, last_nl + 1 + (text.size() - last_nl) / 2);
  std::istringstream is(cut);
  ChainFile cf = read_chain(is);
  CHECK(cf.truncated);
  CHECK(cf.size() == 4);
}

TEST_CASE("run with data and marginal sampling") {
  Rng data_rng(29);
  Eigen::MatrixXd x(60, 2);
  for (int i = 0; i < 60; ++i) {
    x(i, 0) = data_rng.normal();
    x(i, 1) = 0.6 * x(i, 0) + 0.8 * data_rng.normal();
  }
  Eigen::VectorXd th(2);
  th << 0.0, 1.0;
  std::vector<MarginalModel> models = {MarginalModel::parametric(Family::Gaussian, th),
                                       MarginalModel::parametric(Family::Gaussian, th)};
  RunConfig cfg = flat_config();
  cfg.iterations = 300;
  cfg.burnin = 100;
  cfg.thin = 10;
  cfg.sample_marginals = true;
  std::ostringstream out;
  RunResult res = run(x, models, {{3, 3}}, cfg, &out);
  CHECK(res.saved == 20);
  CHECK(res.theta_proposed == 300);
  std::istringstream is(out.str());
  ChainFile cf = read_chain(is);
  CHECK(cf.n_theta == 4);
  REQUIRE(cf.theta.size() == 20);
  // sampled scales stay in support
  for (const auto& t : cf.theta) {
    CHECK(t[1] > 0.0);
    CHECK(t[3] > 0.0);
  }
}
