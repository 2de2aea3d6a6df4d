#ifndef BYUCOP_PROPOSALS_HPP_
#define BYUCOP_PROPOSALS_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "byucop/math.hpp"
#include "byucop/yett.hpp"

namespace byucop {

struct ProposalKind {
  enum class Type { IRE, GRE, VertexLine };
  Type type = Type::IRE;
  int u = 5;          // exchange iterations for IRE / GRE
  double tau = 500.0; // vertex-line concentration

  static ProposalKind ire(int u) { return {Type::IRE, u, 0.0}; }
  static ProposalKind gre(int u) { return {Type::GRE, u, 0.0}; }
  static ProposalKind vertex_line(double tau) { return {Type::VertexLine, 1, tau}; }
};

struct Proposal {
  YettCopula candidate;
  double log_hastings = 0.0;
  // Retry cap exceeded (GRE null difference); the step counts as rejected.
  bool null_step = false;
  // Sparse cell changes {flat offset, delta} relative to the current state.
  std::vector<std::pair<std::int64_t, double>> delta;
};

// One recorded IRE step, for replay.
struct IreStep {
  RectangleExchange exchange;
  double epsilon = 0.0;
};

Proposal propose_ire(const YettCopula& g, int u, Rng& rng,
                     std::vector<IreStep>* trace = nullptr);

// Sparse difference Z_1 - Z_2 used by the generalized exchange.
struct SparseDiff {
  std::vector<std::pair<std::int64_t, double>> entries;
};

// Builds Z_1 - Z_2 from the per-axis placement permutations sigma (Z_1 has
// mass 1/k_m at cells (sigma_1(i), ..., sigma_d(i)), 0-based) and the
// support permutation pi over {0..k_m-1} applied on every axis to give Z_2.
SparseDiff gre_diff(const Degree& degree,
                    const std::vector<std::vector<int>>& sigma,
                    const std::vector<std::vector<int>>& pi);

// Feasible interval (eps_m, eps_M): the cell minimum of g + eps * diff hits
// exactly zero at the endpoints.
std::pair<double, double> gre_bounds(const YettCopula& g, const SparseDiff& diff);
YettCopula gre_apply(const YettCopula& g, const SparseDiff& diff, double epsilon);

Proposal propose_gre(const YettCopula& g, int u, Rng& rng);

// An extreme point of the yett polytope. Equal degrees: d-1 uniform
// permutations place k cells of mass 1/k. Unequal degrees (d = 2 only):
// northwest-corner allocation over shuffled row/column orders.
YettCopula sample_vertex(const Degree& degree, Rng& rng);

// Largest eps with eps*g + (1-eps)*E still in the polytope; always >= 1.
double vertex_line_max_eps(const YettCopula& g, const YettCopula& vertex);

// Vertex-line proposal with an injected vertex and epsilon (worked-example
// entry point); epsilon must be in (0, eps_M).
Proposal vertex_line_with(const YettCopula& g, const YettCopula& vertex, double tau,
                          double epsilon);

Proposal propose_vertex_line(const YettCopula& g, double tau, Rng& rng);

Proposal propose(const YettCopula& g, const ProposalKind& kind, Rng& rng);

}  // namespace byucop

#endif  // BYUCOP_PROPOSALS_HPP_
