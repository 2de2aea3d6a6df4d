#ifndef BYUCOP_PRIOR_HPP_
#define BYUCOP_PRIOR_HPP_

#include <Eigen/Dense>
#include <vector>

#include "byucop/centering.hpp"
#include "byucop/yett.hpp"

namespace byucop {

enum class DistanceKind { L2, CAR, ICAR };

// Facet adjacency over grid cells: neighbors differ by 1 in exactly one
// coordinate. Stored as per-cell neighbor lists.
struct Adjacency {
  std::vector<std::vector<std::int32_t>> neighbors;

  std::int64_t cell_count() const { return static_cast<std::int64_t>(neighbors.size()); }
};

Adjacency facet_adjacency(const Degree& degree);

struct PriorSpec {
  DistanceKind distance = DistanceKind::ICAR;
  double alpha = 1.0;        // precision, > 0
  double gamma = 0.99;       // CAR smoothing, in (0,1)
  CenteringCopula centering;

  void check() const;
};

// Squared-L2 distance between the piecewise-constant densities.
double distance_l2(const YettCopula& g, const YettCopula& g0);

// Quadratic form v'(D_A - gamma A)v on the cell-mass difference vector; for
// ICAR this is the full pairwise form sum_B sum_{B' in N_B} (v_B - v_B')^2.
double distance_car(const YettCopula& g, const YettCopula& g0, const Adjacency& adj,
                    DistanceKind kind, double gamma);

// Distance for the configured kind.
double prior_distance(const YettCopula& g, const YettCopula& g0_projected,
                      const Adjacency& adj, const PriorSpec& spec);

// Unnormalized log prior -(alpha/2) * D(g, g0_projected).
double log_prior(const YettCopula& g, const YettCopula& g0_projected, const Adjacency& adj,
                 const PriorSpec& spec);

}  // namespace byucop

#endif  // BYUCOP_PRIOR_HPP_
