#ifndef BYUCOP_YETT_HPP_
#define BYUCOP_YETT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace byucop {

// Grid degree: k_j cells per axis on the regular grid of [0,1]^d.
struct Degree {
  std::vector<int> k;

  int dim() const { return static_cast<int>(k.size()); }
  std::int64_t cell_count() const;
  bool operator==(const Degree&) const = default;
};

// 1-based per-axis cell index.
using CellIndex = std::vector<int>;

// A grid-uniform copula on the regular degree-k grid, stored as the flat
// cell-mass vector in row-major multi-index order (last axis fastest).
// Immutable by convention: operations return new values.
struct YettCopula {
  Degree degree;
  Eigen::VectorXd mass;

  std::int64_t offset(const CellIndex& idx) const;
  CellIndex index_of(std::int64_t offset) const;
  double cell(const CellIndex& idx) const { return mass[offset(idx)]; }
};

inline constexpr double kMassTol = 1e-12;
// Cells with |mass| below this after an exchange are snapped to exactly 0.
inline constexpr double kMassClamp = 1e-15;

void check_degree(const Degree& degree);

// Throws std::invalid_argument with a description on the first violated
// invariant (nonnegativity, total mass 1, uniform axis marginals).
void validate(const YettCopula& c, double tol = kMassTol);
bool is_valid(const YettCopula& c, double tol = kMassTol);

// Sum of cell masses with fixed index m on the given axis (0-based axis,
// 1-based m). Must equal 1/k_axis for a valid copula.
double axis_marginal_sum(const YettCopula& c, int axis, int m);

YettCopula independence(const Degree& degree);

// Feasible epsilon interval for the rectangle exchange on axes (i, j) with
// the remaining coordinates anchored. Corners a1 != a2 on axis i and
// b1 != b2 on axis j (1-based).
struct RectangleExchange {
  int axis_i = 0;
  int axis_j = 1;
  CellIndex anchor;  // full d-vector; entries at axis_i/axis_j ignored
  int a1 = 1, a2 = 2;
  int b1 = 1, b2 = 2;
};

std::pair<double, double> rectangle_exchange_bounds(const YettCopula& c,
                                                    const RectangleExchange& ex);

// Moves epsilon of mass with signs (-, +, +, -) across the four corner
// cells. epsilon must lie within the bounds interval.
YettCopula apply_rectangle_exchange(const YettCopula& c, const RectangleExchange& ex,
                                    double epsilon);

// General (possibly unequally spaced) grid copula; only produced by grid
// division, never visited by the sampler.
struct GridCopula {
  std::vector<std::vector<double>> cuts;  // per axis, strictly increasing, 0..1
  Eigen::VectorXd mass;                   // row-major over cells

  int dim() const { return static_cast<int>(cuts.size()); }
  std::int64_t cell_count() const;
  // Piecewise-constant density at an interior point.
  double density(const std::vector<double>& z) const;
};

GridCopula to_grid_copula(const YettCopula& c);

// Inserts new_cut on the given axis; split cells share mass in proportion
// to sub-cell length. new_cut must not coincide with an existing boundary.
GridCopula grid_division(const GridCopula& c, int axis, double new_cut);

// Textual form: header "d k_1 ... k_d", then masses row-major, 17
// significant digits.
void write_yett(std::ostream& os, const YettCopula& c);
YettCopula read_yett(std::istream& is);
std::string to_text(const YettCopula& c);
YettCopula from_text(const std::string& text);

}  // namespace byucop

#endif  // BYUCOP_YETT_HPP_
