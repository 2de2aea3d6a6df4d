// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and timed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "byucop/baseline.hpp"
#include "byucop/diagnostics.hpp"
#include "byucop/mcmc.hpp"
#include "helpers.hpp"

using namespace byucop;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------------------

void criterion_gre_example(Check& c) {
  YettCopula g = testutil::example_g();
  std::vector<std::vector<int>> sigma = {{0, 1, 2}, {2, 3, 1}};
  std::vector<std::vector<int>> pi = {{0, 1, 2}, {2, 0, 1}};
  SparseDiff diff = gre_diff(g.degree, sigma, pi);
  auto [lo, hi] = gre_bounds(g, diff);
  c.require(lo == -3.0 / 24 && hi == 3.0 / 24, "epsilon bounds not exactly (-3/24, 3/24)");

  YettCopula cand = gre_apply(g, diff, 9.0 / 800);
  YettCopula expected = testutil::make2d(
      {{1.0 / 24, 1.0 / 24 - 3.0 / 800, 4.0 / 24 + 3.0 / 800, 2.0 / 24},
       {2.0 / 24, 4.0 / 24, 1.0 / 24 - 3.0 / 800, 1.0 / 24 + 3.0 / 800},
       {3.0 / 24, 1.0 / 24 + 3.0 / 800, 1.0 / 24, 3.0 / 24 - 3.0 / 800}});
  c.require((cand.mass - expected.mass).cwiseAbs().maxCoeff() < 1e-15,
            "candidate differs from the reference display beyond 1e-15");
  validate(cand);
}

void criterion_vertex_line_example(Check& c) {
  YettCopula g = testutil::example_g();
  YettCopula e = testutil::make2d({{0.0, 1.0 / 12, 0.0, 1.0 / 4},
                                   {1.0 / 4, 1.0 / 12, 0.0, 0.0},
                                   {0.0, 1.0 / 12, 1.0 / 4, 0.0}});
  double eps_max = vertex_line_max_eps(g, e);
  c.require(std::fabs(eps_max - 1.2) < 1e-12, "epsilon_max != 1.2");

  Proposal p = vertex_line_with(g, e, 6.0, 0.936);
  Eigen::VectorXd expected = 0.936 * g.mass + 0.064 * e.mass;
  c.require((p.candidate.mass - expected).cwiseAbs().maxCoeff() < 5e-4,
            "candidate differs from the reference display beyond 5e-4");
  validate(p.candidate);
}

void criterion_structural(Check& c) {
  (void)c;  // failure surfaces as a validation exception
  std::vector<Degree> degrees = {{{3, 4}}, {{5, 5}}, {{3, 3, 3}}};
  std::vector<ProposalKind> kinds = {ProposalKind::ire(5), ProposalKind::gre(2),
                                     ProposalKind::vertex_line(500.0)};
  Rng rng(2024);
  for (const Degree& deg : degrees) {
    for (const ProposalKind& kind : kinds) {
      YettCopula g = independence(deg);
      for (int i = 0; i < 10000; ++i) {
        Proposal p = propose(g, kind, rng);
        validate(p.candidate);  // throws on any violation at 1e-12
        g = std::move(p.candidate);
      }
    }
  }
}

void criterion_uniform_marginals(Check& c) {
  Rng rng(7);
  for (const Degree& deg : {Degree{{3, 4}}, Degree{{3, 3, 3}}}) {
    YettCopula g = testutil::random_copula(deg, 100, rng);
    BernsteinCopula bc(g);
    for (int axis = 0; axis < deg.dim(); ++axis) {
      for (int i = 0; i < 20; ++i) {
        double t = (i + 0.5) / 20;
        c.require(std::fabs(bc.marginal_density(axis, t) - 1.0) < 1e-10,
                  "marginal density deviates from 1 beyond 1e-10");
      }
    }
  }

  // total integral over the unit square
  YettCopula g = testutil::random_copula({{3, 4}}, 100, rng);
  BernsteinCopula bc(g);
  GaussLegendre gl = gauss_legendre(48);
  double integral = 0.0;
  for (int i = 0; i < 48; ++i) {
    for (int j = 0; j < 48; ++j) {
      std::vector<double> u = {0.5 * (gl.nodes[i] + 1), 0.5 * (gl.nodes[j] + 1)};
      integral += 0.25 * gl.weights[i] * gl.weights[j] * bc.density(u);
    }
  }
  c.require(std::fabs(integral - 1.0) < 1e-6, "density integral misses 1 beyond 1e-6");
}

void criterion_bernstein_convergence(Check& c) {
  CorrelationMatrix r;
  r.R = Eigen::Matrix2d::Identity();
  r.R(0, 1) = r.R(1, 0) = 0.5;
  CenteringCopula target = CenteringCopula::make_gaussian(r);

  std::vector<double> sup_err;
  for (int k : {5, 10, 20}) {
    BernsteinCopula bc(project_to_yett(target, {{k, k}}));
    double sup = 0.0;
    for (int i = 0; i < 21; ++i) {
      for (int j = 0; j < 21; ++j) {
        std::vector<double> u = {(i + 0.5) / 21, (j + 0.5) / 21};
        sup = std::max(sup, std::fabs(bc.density(u) - gaussian_copula_density(r, u)));
      }
    }
    sup_err.push_back(sup);
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "sup errors %.4f, %.4f, %.4f", sup_err[0], sup_err[1],
                sup_err[2]);
  c.detail = buf;
  c.require(sup_err[0] > sup_err[1] && sup_err[1] > sup_err[2],
            std::string("sup error not strictly decreasing: ") + buf);
}

void criterion_stationarity(Check& c) {
  // k = (2,2): one free coordinate t = W(1,1) - 1/4 on [-1/4, 1/4]; the ICAR
  // prior with alpha = 10 is proportional to exp(-160 t^2) there.
  const Degree deg{{2, 2}};
  const Adjacency adj = facet_adjacency(deg);
  const YettCopula g0 = independence(deg);
  PriorSpec spec;
  spec.distance = DistanceKind::ICAR;
  spec.alpha = 10.0;

  const double a = std::sqrt(160.0);
  auto cdf = [&](double t) {
    return (std::erf(a * t) + std::erf(a / 4)) / (2.0 * std::erf(a / 4));
  };

  std::vector<ProposalKind> kinds = {ProposalKind::ire(1), ProposalKind::gre(1),
                                     ProposalKind::vertex_line(50.0)};
  const char* names[] = {"ire", "gre", "vertex-line"};
  for (std::size_t kk = 0; kk < kinds.size(); ++kk) {
    Rng rng(1000 + kk);
    YettCopula g = independence(deg);
    double lp = log_prior(g, g0, adj, spec);
    std::vector<double> ts;
    ts.reserve(1000000);
    for (int i = 0; i < 1000000; ++i) {
      Proposal p = propose(g, kinds[kk], rng);
      if (!p.null_step) {
        double lp_new = log_prior(p.candidate, g0, adj, spec);
        if (std::log(rng.uniform()) < lp_new - lp + p.log_hastings) {
          g = std::move(p.candidate);
          lp = lp_new;
        }
      }
      ts.push_back(g.mass[0] - 0.25);
    }
    double ks = testutil::ks_distance(std::move(ts), cdf);
    c.require(ks <= 0.02, std::string(names[kk]) + " Kolmogorov distance " +
                              std::to_string(ks) + " > 0.02");
  }
}

// Shared posterior machinery for criteria 7-9.
struct PosteriorRun {
  std::vector<Eigen::VectorXd> states;
  Eigen::MatrixXd pseudo;
  RunResult result;
};

PosteriorRun run_posterior(const Eigen::MatrixXd& raw, const Degree& deg, RunConfig cfg) {
  std::vector<MarginalModel> models;
  for (int j = 0; j < raw.cols(); ++j) models.push_back(MarginalModel::empirical(raw.col(j)));
  PosteriorRun out;
  out.pseudo = pseudo_observations(raw, models);
  Sampler s(raw, models, deg, cfg);
  Rng rng(cfg.seed);
  for (std::int64_t i = 0; i < cfg.iterations; ++i) {
    out.result.g_accepted += s.update_g(rng);
    ++out.result.g_proposed;
    if (i >= cfg.burnin && (i - cfg.burnin) % cfg.thin == 0) {
      out.states.push_back(s.state().g.mass);
    }
  }
  return out;
}

void criterion_concentration(Check& c) {
  MixtureModel truth = model_by_id("M2");
  DensityFn truth_density = [&](std::span<const double> u) {
    return truth.copula_density(u[0], u[1]);
  };
  const Degree deg{{10, 10}};

  RunConfig cfg;
  cfg.iterations = 200000;
  cfg.burnin = 40000;
  cfg.thin = 400;
  cfg.proposal = ProposalKind::ire(5);
  cfg.prior.alpha = 2.0;

  auto posterior_hellinger = [&](int n, std::uint64_t seed) {
    cfg.seed = seed;
    PosteriorRun run = run_posterior(perfect_sample(truth, n), deg, cfg);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(deg.cell_count());
    for (const auto& w : run.states) mean += w / double(run.states.size());
    YettCopula g;
    g.degree = deg;
    g.mass = mean;
    BernsteinCopula bc(g);
    DensityFn fit = [&bc](std::span<const double> u) {
      return bc.density(std::vector<double>(u.begin(), u.end()));
    };
    return hellinger(fit, truth_density, 2);
  };

  double h600 = posterior_hellinger(600, 11);
  double h2500 = posterior_hellinger(2500, 12);

  // prior draws: same chain with a flat likelihood
  RunConfig prior_cfg = cfg;
  prior_cfg.iterations = 100000;
  prior_cfg.burnin = 20000;
  prior_cfg.thin = 2000;
  prior_cfg.seed = 13;
  Sampler prior_chain(Eigen::MatrixXd(0, 2), {}, deg, prior_cfg);
  Rng rng(prior_cfg.seed);
  double h_prior = 0.0;
  int prior_states = 0;
  for (std::int64_t i = 0; i < prior_cfg.iterations; ++i) {
    prior_chain.update_g(rng);
    if (i >= prior_cfg.burnin && (i - prior_cfg.burnin) % prior_cfg.thin == 0) {
      BernsteinCopula bc(prior_chain.state().g);
      DensityFn draw = [&bc](std::span<const double> u) {
        return bc.density(std::vector<double>(u.begin(), u.end()));
      };
      h_prior += hellinger(draw, truth_density, 2);
      ++prior_states;
    }
  }
  h_prior /= prior_states;

  char buf[160];
  std::snprintf(buf, sizeof buf, "H(600) = %.4f, H(2500) = %.4f, prior mean = %.4f", h600,
                h2500, h_prior);
  c.detail = buf;
  c.require(h2500 < h600, std::string("no concentration: ") + buf);
  c.require(h600 < h_prior && h2500 < h_prior,
            std::string("posterior not below the prior mean: ") + buf);
}

void criterion_ess_ordering(Check& c) {
  Eigen::MatrixXd raw = perfect_sample(model_by_id("M2"), 600);
  const Degree deg{{5, 5}};

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };

  auto median_cell_ess = [&](const ProposalKind& kind, std::uint64_t seed) {
    RunConfig cfg;
    cfg.iterations = 50000;
    cfg.burnin = 5000;
    cfg.thin = 10;
    cfg.seed = seed;
    cfg.proposal = kind;
    cfg.prior.alpha = 2.0;
    PosteriorRun run = run_posterior(raw, deg, cfg);
    std::vector<double> cell_ess;
    std::vector<double> chain(run.states.size());
    for (Eigen::Index cell = 0; cell < deg.cell_count(); ++cell) {
      for (std::size_t s = 0; s < run.states.size(); ++s) chain[s] = run.states[s][cell];
      cell_ess.push_back(ess(chain).ess);
    }
    return median(cell_ess);
  };

  std::vector<double> ire, vl;
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    ire.push_back(median_cell_ess(ProposalKind::ire(5), seed));
    vl.push_back(median_cell_ess(ProposalKind::vertex_line(500.0), seed));
  }
  double mi = median(ire), mv = median(vl);
  char buf[120];
  std::snprintf(buf, sizeof buf, "median cell ESS: ire = %.1f, vertex-line = %.1f", mi, mv);
  c.detail = buf;
  c.require(mi >= mv, std::string("ordering violated: ") + buf);
}

void criterion_waic_ordering(Check& c) {
  // Stand-in for the housing data: a positively dependent, right-skewed pair
  // obtained by exponentiating the bimodal benchmark model. Empirical
  // marginals make the fit rank-based, as in the real protocol.
  Eigen::MatrixXd raw = perfect_sample(model_by_id("M1"), 1000).array().exp();
  const Degree deg{{10, 10}};

  RunConfig cfg;
  cfg.iterations = 150000;
  cfg.burnin = 15000;
  cfg.thin = 150;
  cfg.seed = 31;
  cfg.proposal = ProposalKind::ire(5);
  cfg.prior.alpha = 2.0;
  PosteriorRun run = run_posterior(raw, deg, cfg);

  CopulaLikelihood lik(run.pseudo, deg);
  WaicAccumulator acc(run.pseudo.rows());
  std::vector<double> row(run.pseudo.rows());
  for (const auto& w : run.states) {
    Eigen::VectorXd dens = lik.kernel() * w;
    for (Eigen::Index i = 0; i < dens.size(); ++i) {
      row[i] = std::log(std::max(dens[i], 1e-300));
    }
    acc.add(row);
  }
  double waic_byu = acc.value();

  BaselineResult base = fit_gaussian_copula(run.pseudo, {});
  char buf[120];
  std::snprintf(buf, sizeof buf, "WAIC: bernstein = %.1f, gaussian = %.1f", waic_byu,
                base.waic);
  c.detail = buf;
  c.require(waic_byu < base.waic, std::string("ordering violated: ") + buf);
}

void criterion_hit_and_run(Check& c) {
  CorrelationMatrix r;
  r.R.resize(4, 4);
  r.R << 1.0, 0.4, 0.6, 0.7,
         0.4, 1.0, 0.7, 0.3,
         0.6, 0.7, 1.0, 0.2,
         0.7, 0.3, 0.2, 1.0;

  RunConfig cfg;
  cfg.prior.centering = CenteringCopula::make_gaussian(r);
  cfg.prior.alpha = 2.0;
  cfg.projection.qmc_points = 1 << 12;
  Sampler s(Eigen::MatrixXd(0, 4), {}, {{2, 2, 2, 2}}, cfg);
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    s.update_r(rng);
    if (least_eigenvalue(*s.state().r) <= 0.0) {
      c.require(false, "accepted a non-PSD correlation matrix");
      return;
    }
  }

  // injected zero steps are never rejected
  Eigen::VectorXd z(6);
  z << 0.3, -1.2, 0.8, 0.1, -0.4, 2.0;
  for (int i = 0; i < 100; ++i) {
    c.require(s.update_r_given(0.0, z, rng), "rejected a delta = 0 proposal");
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "non-PSD proposals auto-rejected: %lld",
                static_cast<long long>(s.nonpsd_rejections()));
  c.detail = buf;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> fn;
  };
  std::vector<Criterion> criteria = {
      {"generalized rectangle exchange worked example", criterion_gre_example},
      {"vertex-line worked example", criterion_vertex_line_example},
      {"structural invariants over 10^4 steps per kernel", criterion_structural},
      {"uniform marginals and unit normalization", criterion_uniform_marginals},
      {"Bernstein sup-error decreases in k", criterion_bernstein_convergence},
      {"prior stationarity of all kernels (k = 2)", criterion_stationarity},
      {"posterior Hellinger concentration", criterion_concentration},
      {"median cell ESS: IRE vs vertex-line", criterion_ess_ordering},
      {"WAIC ordering vs Gaussian-copula baseline", criterion_waic_ordering},
      {"hit-and-run PSD lawfulness", criterion_hit_and_run},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check chk;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].fn(chk);
    } catch (const std::exception& e) {
      chk.ok = false;
      chk.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !chk.ok;
    std::printf("criterion %2zu: %s  %-48s  (%.1f s)%s%s\n", i + 1,
                chk.ok ? "PASS" : "FAIL", criteria[i].name, secs,
                chk.detail.empty() ? "" : "  -- ", chk.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
