#include "byucop/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace byucop {

namespace {

void collect_delta(const YettCopula& before, const YettCopula& after, Proposal& p) {
  p.delta.clear();
  for (std::int64_t o = 0; o < before.mass.size(); ++o) {
    double d = after.mass[o] - before.mass[o];
    if (d != 0.0) p.delta.emplace_back(o, d);
  }
}

RectangleExchange random_exchange(const Degree& degree, Rng& rng) {
  const int d = degree.dim();
  RectangleExchange ex;
  ex.axis_i = static_cast<int>(rng.uniform_int(d));
  do {
    ex.axis_j = static_cast<int>(rng.uniform_int(d));
  } while (ex.axis_j == ex.axis_i);
  if (ex.axis_i > ex.axis_j) std::swap(ex.axis_i, ex.axis_j);
  ex.anchor.resize(d);
  for (int j = 0; j < d; ++j) ex.anchor[j] = 1 + static_cast<int>(rng.uniform_int(degree.k[j]));
  int ki = degree.k[ex.axis_i], kj = degree.k[ex.axis_j];
  ex.a1 = 1 + static_cast<int>(rng.uniform_int(ki));
  do {
    ex.a2 = 1 + static_cast<int>(rng.uniform_int(ki));
  } while (ex.a2 == ex.a1);
  ex.b1 = 1 + static_cast<int>(rng.uniform_int(kj));
  do {
    ex.b2 = 1 + static_cast<int>(rng.uniform_int(kj));
  } while (ex.b2 == ex.b1);
  return ex;
}

}  // namespace

Proposal propose_ire(const YettCopula& g, int u, Rng& rng, std::vector<IreStep>* trace) {
  if (u < 1) throw std::invalid_argument("propose_ire: u must be >= 1");
  Proposal p;
  p.candidate = g;
  for (int step = 0; step < u; ++step) {
    RectangleExchange ex = random_exchange(g.degree, rng);
    auto [lo, hi] = rectangle_exchange_bounds(p.candidate, ex);
    double eps = (hi > lo) ? rng.uniform(lo, hi) : 0.0;
    p.candidate = apply_rectangle_exchange(p.candidate, ex, eps);
    if (trace) trace->push_back({ex, eps});
  }
  p.log_hastings = 0.0;  // RE and IRE are symmetric
  collect_delta(g, p.candidate, p);
  return p;
}

SparseDiff gre_diff(const Degree& degree, const std::vector<std::vector<int>>& sigma,
                    const std::vector<std::vector<int>>& pi) {
  const int d = degree.dim();
  int km = *std::min_element(degree.k.begin(), degree.k.end());
  double w = 1.0 / km;
  std::map<std::int64_t, double> cells;
  auto offset_of = [&](const std::vector<int>& zero_based) {
    std::int64_t off = 0;
    for (int j = 0; j < d; ++j) off = off * degree.k[j] + zero_based[j];
    return off;
  };
  std::vector<int> idx(d);
  for (int i = 0; i < km; ++i) {
    for (int j = 0; j < d; ++j) idx[j] = sigma[j][i];
    cells[offset_of(idx)] += w;  // Z_1
    for (int j = 0; j < d; ++j) idx[j] = sigma[j][pi[j][i]];
    cells[offset_of(idx)] -= w;  // Z_2
  }
  SparseDiff diff;
  for (const auto& [off, v] : cells) {
    if (std::fabs(v) > 1e-15) diff.entries.emplace_back(off, v);
  }
  return diff;
}

std::pair<double, double> gre_bounds(const YettCopula& g, const SparseDiff& diff) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& [off, coef] : diff.entries) {
    double limit = -g.mass[off] / coef;
    if (coef > 0.0) {
      lo = std::max(lo, limit);
    } else {
      hi = std::min(hi, limit);
    }
  }
  return {lo, hi};
}

YettCopula gre_apply(const YettCopula& g, const SparseDiff& diff, double epsilon) {
  YettCopula out = g;
  for (const auto& [off, coef] : diff.entries) {
    out.mass[off] += epsilon * coef;
    if (std::fabs(out.mass[off]) < kMassClamp) out.mass[off] = 0.0;
  }
  return out;
}

Proposal propose_gre(const YettCopula& g, int u, Rng& rng) {
  if (u < 1) throw std::invalid_argument("propose_gre: u must be >= 1");
  const Degree& deg = g.degree;
  const int d = deg.dim();
  int km = *std::min_element(deg.k.begin(), deg.k.end());
  constexpr int kRetryCap = 100;

  Proposal p;
  p.candidate = g;
  for (int step = 0; step < u; ++step) {
    SparseDiff diff;
    bool found = false;
    for (int attempt = 0; attempt < kRetryCap; ++attempt) {
      std::vector<std::vector<int>> sigma(d), pi(d);
      for (int j = 0; j < d; ++j) {
        // sigma_j places the km diagonal cells onto axis j
        std::vector<int> perm = random_permutation(deg.k[j], rng);
        sigma[j] = std::vector<int>(perm.begin(), perm.begin() + km);
        pi[j] = random_permutation(km, rng);
      }
      diff = gre_diff(deg, sigma, pi);
      if (!diff.entries.empty()) {
        found = true;
        break;
      }
    }
    if (!found) {
      p.null_step = true;
      p.candidate = g;
      p.delta.clear();
      return p;
    }
    auto [lo, hi] = gre_bounds(p.candidate, diff);
    double eps = (hi > lo) ? rng.uniform(lo, hi) : 0.0;
    p.candidate = gre_apply(p.candidate, diff, eps);
  }
  p.log_hastings = 0.0;  // symmetric
  collect_delta(g, p.candidate, p);
  return p;
}

YettCopula sample_vertex(const Degree& degree, Rng& rng) {
  check_degree(degree);
  const int d = degree.dim();
  bool equal_k = std::all_of(degree.k.begin(), degree.k.end(),
                             [&](int kj) { return kj == degree.k[0]; });
  YettCopula v;
  v.degree = degree;
  v.mass = Eigen::VectorXd::Zero(degree.cell_count());
  if (equal_k) {
    int k = degree.k[0];
    std::vector<std::vector<int>> perms(d);
    perms[0].resize(k);
    for (int i = 0; i < k; ++i) perms[0][i] = i;
    for (int j = 1; j < d; ++j) perms[j] = random_permutation(k, rng);
    for (int i = 0; i < k; ++i) {
      std::int64_t off = 0;
      for (int j = 0; j < d; ++j) off = off * k + perms[j][i];
      v.mass[off] = 1.0 / k;
    }
    return v;
  }
  if (d != 2) {
    throw std::invalid_argument("sample_vertex: unequal degrees supported only for d = 2");
  }
  // Northwest-corner allocation over shuffled row/column orders. Not uniform
  // over vertices; see project notes.
  int k1 = degree.k[0], k2 = degree.k[1];
  std::vector<int> rows = random_permutation(k1, rng);
  std::vector<int> cols = random_permutation(k2, rng);
  std::vector<double> row_budget(k1, 1.0 / k1), col_budget(k2, 1.0 / k2);
  std::size_t ri = 0, ci = 0;
  while (ri < rows.size() && ci < cols.size()) {
    int r = rows[ri], c = cols[ci];
    double take = std::min(row_budget[r], col_budget[c]);
    v.mass[static_cast<std::int64_t>(r) * k2 + c] += take;
    row_budget[r] -= take;
    col_budget[c] -= take;
    if (row_budget[r] <= 1e-15) ++ri;
    if (col_budget[c] <= 1e-15) ++ci;
  }
  return v;
}

double vertex_line_max_eps(const YettCopula& g, const YettCopula& vertex) {
  // f(eps) = vertex + eps * (g - vertex); cells with g < e exit first.
  double eps_max = std::numeric_limits<double>::infinity();
  for (std::int64_t o = 0; o < g.mass.size(); ++o) {
    double gv = g.mass[o], ev = vertex.mass[o];
    if (gv < ev) eps_max = std::min(eps_max, ev / (ev - gv));
  }
  if (!std::isfinite(eps_max)) eps_max = 1.0;  // g coincides with the vertex
  return eps_max;
}

namespace {
double vertex_line_log_hastings(double tau, double eps_star, double eps_max) {
  // Hastings correction with the forward anchor eps^(i) = 1; the normal pdf
  // factors cancel and only the truncation masses remain.
  double st = std::sqrt(tau);
  double fwd = norm_cdf(st * (eps_max - 1.0)) - norm_cdf(-st);
  double rev = norm_cdf(st * (eps_max - eps_star)) - norm_cdf(-eps_star * st);
  return std::log(std::max(fwd, 1e-300)) - std::log(std::max(rev, 1e-300));
}
}  // namespace

Proposal vertex_line_with(const YettCopula& g, const YettCopula& vertex, double tau,
                          double epsilon) {
  double eps_max = vertex_line_max_eps(g, vertex);
  if (!(epsilon > 0.0 && epsilon <= eps_max)) {
    throw std::invalid_argument("vertex_line: epsilon outside (0, eps_M]");
  }
  Proposal p;
  p.candidate = g;
  p.candidate.mass = epsilon * g.mass + (1.0 - epsilon) * vertex.mass;
  for (std::int64_t o = 0; o < p.candidate.mass.size(); ++o) {
    if (std::fabs(p.candidate.mass[o]) < kMassClamp) p.candidate.mass[o] = 0.0;
  }
  p.log_hastings = vertex_line_log_hastings(tau, epsilon, eps_max);
  collect_delta(g, p.candidate, p);
  return p;
}

Proposal propose_vertex_line(const YettCopula& g, double tau, Rng& rng) {
  if (!(tau > 0.0)) throw std::invalid_argument("propose_vertex_line: tau must be positive");
  YettCopula vertex = sample_vertex(g.degree, rng);
  double eps_max = vertex_line_max_eps(g, vertex);
  double eps = rng.truncated_normal(1.0, 1.0 / std::sqrt(tau), 0.0, eps_max);
  if (eps <= 0.0) eps = std::min(1.0, eps_max);
  return vertex_line_with(g, vertex, tau, eps);
}

Proposal propose(const YettCopula& g, const ProposalKind& kind, Rng& rng) {
  switch (kind.type) {
    case ProposalKind::Type::IRE:
      return propose_ire(g, kind.u, rng);
    case ProposalKind::Type::GRE:
      return propose_gre(g, kind.u, rng);
    case ProposalKind::Type::VertexLine:
      return propose_vertex_line(g, kind.tau, rng);
  }
  throw std::logic_error("propose: unknown kind");
}

}  // namespace byucop
