// Command-line driver: fit / simulate / diagnose / compare.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "byucop/baseline.hpp"
#include "byucop/diagnostics.hpp"
#include "byucop/io.hpp"
#include "byucop/mcmc.hpp"

namespace fs = std::filesystem;
using namespace byucop;

namespace {

Degree degree_from_config(const Config& cfg, int d) {
  Degree deg;
  if (cfg.has("degree.k")) {
    for (double v : cfg.get_list("degree.k")) deg.k.push_back(static_cast<int>(v));
    if (deg.dim() == 1 && d > 1) deg.k.assign(d, deg.k[0]);
  } else {
    deg.k.assign(d, 5);
  }
  if (deg.dim() != d) throw std::runtime_error("degree.k does not match data dimension");
  return deg;
}

std::vector<MarginalModel> marginals_from_config(const Config& cfg, const Eigen::MatrixXd& x) {
  std::vector<MarginalModel> models;
  std::string kind = cfg.get_or("marginals.kind", "empirical");
  if (kind == "empirical") {
    for (Eigen::Index j = 0; j < x.cols(); ++j) models.push_back(MarginalModel::empirical(x.col(j)));
    return models;
  }
  if (kind != "parametric") throw std::runtime_error("marginals.kind must be empirical|parametric");
  auto fams = cfg.get_words("marginals.families");
  if (static_cast<Eigen::Index>(fams.size()) != x.cols()) {
    throw std::runtime_error("marginals.families count does not match data dimension");
  }
  auto init = cfg.get_list("marginals.init");
  std::size_t pos = 0;
  for (const auto& fname : fams) {
    Family f = family_from_string(fname);
    int np = family_param_count(f);
    if (pos + np > init.size()) throw std::runtime_error("marginals.init too short");
    Eigen::VectorXd th(np);
    for (int p = 0; p < np; ++p) th[p] = init[pos + p];
    pos += np;
    models.push_back(MarginalModel::parametric(f, th));
  }
  if (pos != init.size()) throw std::runtime_error("marginals.init too long");
  return models;
}

RunConfig run_config_from(const Config& cfg) {
  RunConfig rc;
  rc.iterations = cfg.has("run.iterations") ? cfg.get_int("run.iterations") : 10000;
  rc.burnin = cfg.has("run.burnin") ? cfg.get_int("run.burnin") : rc.iterations / 5;
  rc.thin = cfg.has("run.thin") ? cfg.get_int("run.thin") : 10;
  rc.seed = cfg.has("seed") ? static_cast<std::uint64_t>(cfg.get_int("seed")) : 1;
  if (cfg.has("run.g_subsweeps")) rc.g_subsweeps = static_cast<int>(cfg.get_int("run.g_subsweeps"));
  if (cfg.has("run.r_hr")) rc.r_hr = cfg.get_double("run.r_hr");
  std::string pk = cfg.get_or("proposal.kind", "ire");
  int u = cfg.has("proposal.u") ? static_cast<int>(cfg.get_int("proposal.u")) : 5;
  double tau = cfg.has("proposal.tau") ? cfg.get_double("proposal.tau") : 500.0;
  if (pk == "ire") {
    rc.proposal = ProposalKind::ire(u);
  } else if (pk == "gre") {
    rc.proposal = ProposalKind::gre(u);
  } else if (pk == "vertex-line") {
    rc.proposal = ProposalKind::vertex_line(tau);
  } else {
    throw std::runtime_error("proposal.kind must be ire|gre|vertex-line");
  }
  std::string dist = cfg.get_or("prior.distance", "icar");
  if (dist == "l2") {
    rc.prior.distance = DistanceKind::L2;
  } else if (dist == "car") {
    rc.prior.distance = DistanceKind::CAR;
  } else if (dist == "icar") {
    rc.prior.distance = DistanceKind::ICAR;
  } else {
    throw std::runtime_error("prior.distance must be l2|car|icar");
  }
  if (cfg.has("prior.alpha")) rc.prior.alpha = cfg.get_double("prior.alpha");
  if (cfg.has("prior.gamma")) rc.prior.gamma = cfg.get_double("prior.gamma");
  std::string cent = cfg.get_or("prior.centering", "independence");
  if (cent == "gaussian") {
    if (!cfg.has("prior.r")) throw std::runtime_error("prior.centering=gaussian needs prior.r");
    auto vals = cfg.get_list("prior.r");
    // upper triangle, row-major
    int d = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * vals.size())) / 2.0);
    if (d * (d - 1) / 2 != static_cast<int>(vals.size())) {
      throw std::runtime_error("prior.r must hold an upper triangle");
    }
    CorrelationMatrix r;
    r.R = Eigen::MatrixXd::Identity(d, d);
    std::size_t p = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        r.R(i, j) = r.R(j, i) = vals[p++];
      }
    }
    rc.prior.centering = CenteringCopula::make_gaussian(r);
  } else if (cent != "independence") {
    throw std::runtime_error("prior.centering must be independence|gaussian");
  }
  if (cfg.has("marginals.sample")) rc.sample_marginals = cfg.get_int("marginals.sample") != 0;
  if (cfg.has("projection.qmc_points")) rc.projection.qmc_points = cfg.get_int("projection.qmc_points");
  if (cfg.has("projection.sinkhorn_iterations")) {
    rc.projection.sinkhorn_iterations = static_cast<int>(cfg.get_int("projection.sinkhorn_iterations"));
  }
  return rc;
}

// Per-observation log-likelihood rows of the saved states, streamed into
// WAIC without materializing the S x n matrix.
double chain_waic(const ChainFile& chain, const Eigen::MatrixXd& pseudo) {
  CopulaLikelihood lik(pseudo, chain.degree);
  WaicAccumulator acc(pseudo.rows());
  std::vector<double> row(pseudo.rows());
  for (const auto& w : chain.w) {
    Eigen::VectorXd dens = lik.kernel() * w;
    for (Eigen::Index i = 0; i < dens.size(); ++i) {
      row[i] = std::log(std::max(dens[i], 1e-300));
    }
    acc.add(row);
  }
  return acc.value();
}

std::vector<double> cell_ess(const ChainFile& chain) {
  std::vector<double> out;
  if (chain.w.size() < 10) return out;
  std::vector<double> series(chain.w.size());
  for (Eigen::Index c = 0; c < chain.w.front().size(); ++c) {
    for (std::size_t s = 0; s < chain.w.size(); ++s) series[s] = chain.w[s][c];
    out.push_back(ess(series).ess);
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_fit(const std::string& config_path, std::int64_t seed_override,
            const std::string& out_override, int chains_override) {
  Config cfg = Config::parse_file(config_path);
  if (seed_override >= 0) cfg.set("seed", std::to_string(seed_override));
  std::string out_dir = !out_override.empty() ? out_override : cfg.get_or("output.dir", ".");
  fs::create_directories(out_dir);

  Dataset ds = read_csv_file(cfg.get("data.path"));
  if (ds.x.cols() < 2) throw std::runtime_error("fit: data must have at least 2 columns");
  Degree deg = degree_from_config(cfg, static_cast<int>(ds.x.cols()));
  auto models = marginals_from_config(cfg, ds.x);
  RunConfig rc = run_config_from(cfg);
  int n_chains = chains_override > 0
                     ? chains_override
                     : (cfg.has("run.chains") ? static_cast<int>(cfg.get_int("run.chains")) : 1);

  std::vector<std::pair<std::string, std::string>> echo = cfg.entries();
  std::vector<RunResult> results(n_chains);
  std::vector<std::string> chain_paths(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);
  std::vector<std::thread> workers;
  for (int c = 0; c < n_chains; ++c) {
    chain_paths[c] = (fs::path(out_dir) / ("chain_" + std::to_string(c) + ".txt")).string();
    workers.emplace_back([&, c] {
      try {
        RunConfig rcc = rc;
        rcc.seed = rc.seed + 1000003ull * static_cast<std::uint64_t>(c);
        std::ofstream os(chain_paths[c]);
        if (!os) throw std::runtime_error("cannot open " + chain_paths[c]);
        results[c] = run(ds.x, models, deg, rcc, &os, echo);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // WAIC and cell ESS pooled over chains.
  Eigen::MatrixXd pseudo = pseudo_observations(ds.x, models);
  ChainFile pooled;
  std::vector<double> ess_values;
  double waic_value = 0.0;
  {
    bool first = true;
    for (int c = 0; c < n_chains; ++c) {
      std::ifstream is(chain_paths[c]);
      ChainFile cf = read_chain(is);
      auto e = cell_ess(cf);
      ess_values.insert(ess_values.end(), e.begin(), e.end());
      if (first) {
        pooled = std::move(cf);
        first = false;
      } else {
        pooled.w.insert(pooled.w.end(), cf.w.begin(), cf.w.end());
      }
    }
    waic_value = chain_waic(pooled, pseudo);
  }

  std::string summary_path = (fs::path(out_dir) / "summary.txt").string();
  std::ofstream sum(summary_path);
  sum << "byucop-fit-summary\n";
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(data_fingerprint(ds.x)));
  sum << "data.fingerprint = " << hex << "\n";
  sum << "data.n = " << ds.x.rows() << "\n";
  sum << "data.d = " << ds.x.cols() << "\n";
  sum << "chains = " << n_chains << "\n";
  sum << "saved = " << pooled.w.size() << "\n";
  for (int c = 0; c < n_chains; ++c) {
    sum << "chain." << c << ".accept.g = " << results[c].accept_g() << "\n";
    if (results[c].r_proposed) sum << "chain." << c << ".accept.r = " << results[c].accept_r() << "\n";
    if (results[c].theta_proposed) {
      sum << "chain." << c << ".accept.theta = " << results[c].accept_theta() << "\n";
    }
    sum << "chain." << c << ".seconds = " << results[c].seconds << "\n";
  }
  sum << "ess.median = " << median(ess_values) << "\n";
  sum << "waic.byu = " << waic_value << "\n";
  if (cfg.get_or("fit.baseline", "none") == "gaussian") {
    BaselineOptions bopt;
    bopt.seed = rc.seed;
    BaselineResult br = fit_gaussian_copula(pseudo, bopt);
    sum << "waic.baseline = " << br.waic << "\n";
    sum << "baseline.accept = " << br.accept << "\n";
  }
  sum << "config.echo.begin\n";
  cfg.echo(sum);
  sum << "config.echo.end\n";
  std::cout << "fit: " << n_chains << " chain(s), " << pooled.w.size() << " saved states, WAIC "
            << waic_value << "\n"
            << "summary: " << summary_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& model_id, int n, const std::string& out_path,
                 std::int64_t /*seed*/) {
  MixtureModel model = model_by_id(model_id);
  Eigen::MatrixXd pts = perfect_sample(model, n);
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("cannot open " + out_path);
  write_csv(os, pts, {"x1", "x2"});
  std::cout << "simulate: " << model_id << ", n=" << n << " -> " << out_path << "\n";
  return 0;
}

DensityFn reference_density(const std::string& ref) {
  auto colon = ref.find(':');
  std::string kind = ref.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : ref.substr(colon + 1);
  if (kind == "gaussian") {
    double rho = std::stod(arg);
    CorrelationMatrix r;
    r.R = Eigen::MatrixXd::Identity(2, 2);
    r.R(0, 1) = r.R(1, 0) = rho;
    validate(r);
    return [r](std::span<const double> z) { return gaussian_copula_density(r, z); };
  }
  if (kind == "model") {
    MixtureModel m = model_by_id(arg);
    return [m](std::span<const double> z) { return m.copula_density(z[0], z[1]); };
  }
  throw std::runtime_error("reference must be gaussian:<rho> or model:<M1..M4>");
}

int cmd_diagnose(const std::string& chain_path, const std::string& reference,
                 const std::string& out_dir, int grid) {
  std::ifstream is(chain_path);
  if (!is) throw std::runtime_error("cannot open " + chain_path);
  ChainFile cf = read_chain(is);
  if (cf.truncated) std::cerr << "warning: truncated chain file; using readable prefix\n";
  if (cf.w.empty()) throw std::runtime_error("diagnose: chain has no states");
  if (cf.w.front().size() == 0) throw std::runtime_error("diagnose: empty functional set");
  fs::create_directories(out_dir);

  auto ess_values = cell_ess(cf);
  std::string report_path = (fs::path(out_dir) / "diagnose.txt").string();
  std::ofstream rep(report_path);
  rep << "byucop-diagnose\n";
  rep << "states = " << cf.w.size() << "\n";
  rep << "cells = " << cf.w.front().size() << "\n";
  if (!ess_values.empty()) {
    auto [mn, mx] = std::minmax_element(ess_values.begin(), ess_values.end());
    rep << "ess.min = " << *mn << "\n";
    rep << "ess.median = " << median(ess_values) << "\n";
    rep << "ess.max = " << *mx << "\n";
  } else {
    rep << "ess.note = chain too short for ESS (need >= 10 states)\n";
  }

  if (!reference.empty()) {
    if (cf.degree.dim() != 2) throw std::runtime_error("diagnose: reference needs d = 2");
    DensityFn ref = reference_density(reference);
    YettCopula mean;
    mean.degree = cf.degree;
    mean.mass = Eigen::VectorXd::Zero(cf.degree.cell_count());
    for (const auto& w : cf.w) mean.mass += w;
    mean.mass /= static_cast<double>(cf.w.size());
    BernsteinCopula bc(mean);
    DensityFn post = [&](std::span<const double> z) { return bc.density(z); };
    rep << "hellinger.posterior_mean = " << hellinger(post, ref, 2) << "\n";
  }

  if (cf.degree.dim() == 2) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(grid) * grid, 2);
    Eigen::Index r = 0;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        pts(r, 0) = (i + 0.5) / grid;
        pts(r, 1) = (j + 0.5) / grid;
        ++r;
      }
    }
    Eigen::VectorXd dens = posterior_mean_density(cf.w, cf.degree, pts);
    std::string table_path = (fs::path(out_dir) / "posterior_mean_density.txt").string();
    std::ofstream tab(table_path);
    tab << "x y value\n";
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      tab << pts(i, 0) << ' ' << pts(i, 1) << ' ' << dens[i] << "\n";
    }
    rep << "density.table = " << table_path << "\n";
  }
  std::cout << "diagnose: report at " << report_path << "\n";
  return 0;
}

struct SummaryInfo {
  std::string label;
  std::string fingerprint;
  double waic = 0.0;
  bool has_baseline = false;
  double baseline_waic = 0.0;
};

SummaryInfo read_summary(const std::string& dir) {
  std::string path = (fs::path(dir) / "summary.txt").string();
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  SummaryInfo info;
  info.label = fs::path(dir).filename().string();
  if (info.label.empty()) info.label = dir;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key, eq;
    ls >> key >> eq;
    if (key == "data.fingerprint") ls >> info.fingerprint;
    if (key == "waic.byu") ls >> info.waic;
    if (key == "waic.baseline") {
      ls >> info.baseline_waic;
      info.has_baseline = true;
    }
  }
  if (info.fingerprint.empty()) throw std::runtime_error("summary missing fingerprint: " + path);
  return info;
}

int cmd_compare(const std::vector<std::string>& fit_dirs) {
  if (fit_dirs.size() < 2) throw std::runtime_error("compare: need at least 2 fit outputs");
  std::vector<SummaryInfo> infos;
  for (const auto& d : fit_dirs) infos.push_back(read_summary(d));
  for (const auto& i : infos) {
    if (i.fingerprint != infos.front().fingerprint) {
      throw std::runtime_error("compare: fits were run on different datasets");
    }
  }
  struct Row {
    std::string label;
    double waic;
  };
  std::vector<Row> rows;
  for (const auto& i : infos) {
    rows.push_back({i.label, i.waic});
    if (i.has_baseline) rows.push_back({i.label + " (gaussian baseline)", i.baseline_waic});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.waic < b.waic; });
  std::cout << "rank model waic\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::cout << (i + 1) << ' ' << rows[i].label << ' ' << rows[i].waic;
    if (i > 0 && std::fabs(rows[i].waic - rows[i - 1].waic) < 1.0) std::cout << "  (tie)";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric copula estimation via Bernstein smoothing of "
               "grid-uniform copulas"};
  app.require_subcommand(1);

  std::string config_path, out = "", model_id = "M2", chain_path, reference;
  std::int64_t seed = -1;
  int n = 600, chains = 0, grid = 50;
  std::vector<std::string> fit_dirs;

  auto* fit = app.add_subcommand("fit", "Run the posterior sampler");
  fit->add_option("--config", config_path, "Config file")->required();
  fit->add_option("--seed", seed, "Seed override");
  fit->add_option("--out", out, "Output directory");
  fit->add_option("--chains", chains, "Concurrent chains");

  auto* sim = app.add_subcommand("simulate", "Write a perfect-sample dataset");
  sim->add_option("--model", model_id, "M1..M4")->required();
  sim->add_option("--n", n, "Sample size")->required();
  sim->add_option("--out", out, "Output CSV path");
  sim->add_option("--seed", seed, "Unused; accepted for interface uniformity");

  auto* diag = app.add_subcommand("diagnose", "Chain diagnostics report");
  diag->add_option("--chain", chain_path, "Chain file")->required();
  diag->add_option("--reference", reference, "gaussian:<rho> or model:<id>");
  diag->add_option("--out", out, "Output directory");
  diag->add_option("--grid", grid, "Density table resolution");

  auto* cmp = app.add_subcommand("compare", "Rank fit outputs by WAIC");
  cmp->add_option("--fit", fit_dirs, "Fit output directory (repeat)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) return cmd_fit(config_path, seed, out, chains);
    if (*sim) return cmd_simulate(model_id, n, out.empty() ? "sample.csv" : out, seed);
    if (*diag) return cmd_diagnose(chain_path, reference, out.empty() ? "." : out, grid);
    if (*cmp) return cmd_compare(fit_dirs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
