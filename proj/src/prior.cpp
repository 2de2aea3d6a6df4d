#include "byucop/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace byucop {

Adjacency facet_adjacency(const Degree& degree) {
  check_degree(degree);
  const int d = degree.dim();
  const std::int64_t n = degree.cell_count();
  Adjacency adj;
  adj.neighbors.resize(n);
  std::vector<std::int64_t> strides(d, 1);
  for (int j = d - 2; j >= 0; --j) strides[j] = strides[j + 1] * degree.k[j + 1];
  std::vector<int> idx(d, 1);
  for (std::int64_t o = 0; o < n; ++o) {
    std::int64_t rem = o;
    for (int j = d - 1; j >= 0; --j) {
      idx[j] = static_cast<int>(rem % degree.k[j]) + 1;
      rem /= degree.k[j];
    }
    for (int j = 0; j < d; ++j) {
      if (idx[j] > 1) adj.neighbors[o].push_back(static_cast<std::int32_t>(o - strides[j]));
      if (idx[j] < degree.k[j]) {
        adj.neighbors[o].push_back(static_cast<std::int32_t>(o + strides[j]));
      }
    }
  }
  return adj;
}

void PriorSpec::check() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("prior: alpha must be positive");
  if (distance == DistanceKind::CAR && !(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("prior: CAR gamma must be in (0,1)");
  }
}

double distance_l2(const YettCopula& g, const YettCopula& g0) {
  if (!(g.degree == g0.degree)) throw std::invalid_argument("distance_l2: degree mismatch");
  // integral of (g - g0)^2 for piecewise-constant densities: cells share the
  // common volume lambda = 1 / prod k_j, density = mass / lambda.
  double lambda = 1.0 / static_cast<double>(g.degree.cell_count());
  return (g.mass - g0.mass).squaredNorm() / lambda;
}

double distance_car(const YettCopula& g, const YettCopula& g0, const Adjacency& adj,
                    DistanceKind kind, double gamma) {
  if (!(g.degree == g0.degree)) throw std::invalid_argument("distance_car: degree mismatch");
  if (adj.cell_count() != g.degree.cell_count()) {
    throw std::invalid_argument("distance_car: adjacency cell count mismatch");
  }
  Eigen::VectorXd v = g.mass - g0.mass;
  if (kind == DistanceKind::ICAR) {
    // Full pairwise form over ordered neighbor pairs.
    double s = 0.0;
    for (std::int64_t i = 0; i < adj.cell_count(); ++i) {
      for (std::int32_t j : adj.neighbors[i]) {
        double diff = v[i] - v[j];
        s += diff * diff;
      }
    }
    return s;
  }
  // v'(D_A - gamma A)v with 0/1 facet adjacency.
  double s = 0.0;
  for (std::int64_t i = 0; i < adj.cell_count(); ++i) {
    double cross = 0.0;
    for (std::int32_t j : adj.neighbors[i]) cross += v[j];
    s += v[i] * (static_cast<double>(adj.neighbors[i].size()) * v[i] - gamma * cross);
  }
  return s;
}

double prior_distance(const YettCopula& g, const YettCopula& g0_projected,
                      const Adjacency& adj, const PriorSpec& spec) {
  switch (spec.distance) {
    case DistanceKind::L2:
      return distance_l2(g, g0_projected);
    case DistanceKind::CAR:
      return distance_car(g, g0_projected, adj, DistanceKind::CAR, spec.gamma);
    case DistanceKind::ICAR:
      return distance_car(g, g0_projected, adj, DistanceKind::ICAR, 1.0);
  }
  throw std::logic_error("prior_distance: unknown kind");
}

double log_prior(const YettCopula& g, const YettCopula& g0_projected, const Adjacency& adj,
                 const PriorSpec& spec) {
  spec.check();
  return -0.5 * spec.alpha * prior_distance(g, g0_projected, adj, spec);
}

}  // namespace byucop
