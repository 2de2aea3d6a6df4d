#include "byucop/yett.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace byucop {

std::int64_t Degree::cell_count() const {
  std::int64_t n = 1;
  for (int kj : k) n *= kj;
  return n;
}

void check_degree(const Degree& degree) {
  if (degree.dim() < 2) throw std::invalid_argument("degree: d must be >= 2");
  for (int kj : degree.k) {
    if (kj < 1) throw std::invalid_argument("degree: every k_j must be >= 1");
  }
}

std::int64_t YettCopula::offset(const CellIndex& idx) const {
  std::int64_t off = 0;
  for (int j = 0; j < degree.dim(); ++j) {
    if (idx[j] < 1 || idx[j] > degree.k[j]) {
      throw std::out_of_range("cell index out of range");
    }
    off = off * degree.k[j] + (idx[j] - 1);
  }
  return off;
}

CellIndex YettCopula::index_of(std::int64_t offset) const {
  CellIndex idx(degree.dim());
  for (int j = degree.dim() - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(offset % degree.k[j]) + 1;
    offset /= degree.k[j];
  }
  return idx;
}

double axis_marginal_sum(const YettCopula& c, int axis, int m) {
  const auto& k = c.degree.k;
  std::int64_t inner = 1;  // product of k after axis
  for (int j = axis + 1; j < c.degree.dim(); ++j) inner *= k[j];
  std::int64_t outer = c.degree.cell_count() / (inner * k[axis]);
  double s = 0.0;
  for (std::int64_t o = 0; o < outer; ++o) {
    std::int64_t base = (o * k[axis] + (m - 1)) * inner;
    for (std::int64_t i = 0; i < inner; ++i) s += c.mass[base + i];
  }
  return s;
}

void validate(const YettCopula& c, double tol) {
  check_degree(c.degree);
  if (c.mass.size() != c.degree.cell_count()) {
    throw std::invalid_argument("yett: mass size does not match degree");
  }
  for (std::int64_t i = 0; i < c.mass.size(); ++i) {
    if (!(c.mass[i] >= 0.0)) {
      throw std::invalid_argument("yett: negative cell mass at offset " + std::to_string(i));
    }
  }
  if (std::fabs(c.mass.sum() - 1.0) > tol) {
    throw std::invalid_argument("yett: total mass differs from 1");
  }
  for (int axis = 0; axis < c.degree.dim(); ++axis) {
    double want = 1.0 / c.degree.k[axis];
    for (int m = 1; m <= c.degree.k[axis]; ++m) {
      if (std::fabs(axis_marginal_sum(c, axis, m) - want) > tol) {
        throw std::invalid_argument("yett: axis " + std::to_string(axis) +
                                    " marginal slice " + std::to_string(m) +
                                    " differs from 1/k");
      }
    }
  }
}

bool is_valid(const YettCopula& c, double tol) {
  try {
    validate(c, tol);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

YettCopula independence(const Degree& degree) {
  check_degree(degree);
  YettCopula c;
  c.degree = degree;
  c.mass = Eigen::VectorXd::Constant(degree.cell_count(), 1.0 / degree.cell_count());
  return c;
}

namespace {
std::int64_t corner_offset(const YettCopula& c, const RectangleExchange& ex, int a, int b) {
  CellIndex idx = ex.anchor;
  idx.resize(c.degree.dim(), 1);
  idx[ex.axis_i] = a;
  idx[ex.axis_j] = b;
  return c.offset(idx);
}
}  // namespace

std::pair<double, double> rectangle_exchange_bounds(const YettCopula& c,
                                                    const RectangleExchange& ex) {
  if (ex.a1 == ex.a2 || ex.b1 == ex.b2) {
    throw std::invalid_argument("rectangle exchange: identical corner indices");
  }
  if (ex.axis_i == ex.axis_j) {
    throw std::invalid_argument("rectangle exchange: axes must differ");
  }
  double w11 = c.mass[corner_offset(c, ex, ex.a1, ex.b1)];
  double w12 = c.mass[corner_offset(c, ex, ex.a1, ex.b2)];
  double w21 = c.mass[corner_offset(c, ex, ex.a2, ex.b1)];
  double w22 = c.mass[corner_offset(c, ex, ex.a2, ex.b2)];
  return {std::max(-w12, -w21), std::min(w11, w22)};
}

YettCopula apply_rectangle_exchange(const YettCopula& c, const RectangleExchange& ex,
                                    double epsilon) {
  auto [lo, hi] = rectangle_exchange_bounds(c, ex);
  if (epsilon < lo || epsilon > hi) {
    throw std::invalid_argument("rectangle exchange: epsilon outside feasible interval");
  }
  YettCopula out = c;
  std::int64_t o11 = corner_offset(c, ex, ex.a1, ex.b1);
  std::int64_t o12 = corner_offset(c, ex, ex.a1, ex.b2);
  std::int64_t o21 = corner_offset(c, ex, ex.a2, ex.b1);
  std::int64_t o22 = corner_offset(c, ex, ex.a2, ex.b2);
  out.mass[o11] -= epsilon;
  out.mass[o12] += epsilon;
  out.mass[o21] += epsilon;
  out.mass[o22] -= epsilon;
  for (std::int64_t o : {o11, o12, o21, o22}) {
    if (std::fabs(out.mass[o]) < kMassClamp) out.mass[o] = 0.0;
  }
  return out;
}

std::int64_t GridCopula::cell_count() const {
  std::int64_t n = 1;
  for (const auto& cj : cuts) n *= static_cast<std::int64_t>(cj.size()) - 1;
  return n;
}

double GridCopula::density(const std::vector<double>& z) const {
  std::int64_t off = 0;
  double vol = 1.0;
  for (int j = 0; j < dim(); ++j) {
    const auto& cj = cuts[j];
    auto it = std::upper_bound(cj.begin(), cj.end(), z[j]);
    std::int64_t cell = std::max<std::int64_t>(1, it - cj.begin()) - 1;
    cell = std::min<std::int64_t>(cell, static_cast<std::int64_t>(cj.size()) - 2);
    off = off * (static_cast<std::int64_t>(cj.size()) - 1) + cell;
    vol *= cj[cell + 1] - cj[cell];
  }
  return mass[off] / vol;
}

GridCopula to_grid_copula(const YettCopula& c) {
  GridCopula g;
  g.cuts.resize(c.degree.dim());
  for (int j = 0; j < c.degree.dim(); ++j) {
    int kj = c.degree.k[j];
    g.cuts[j].resize(kj + 1);
    for (int i = 0; i <= kj; ++i) g.cuts[j][i] = static_cast<double>(i) / kj;
  }
  g.mass = c.mass;
  return g;
}

GridCopula grid_division(const GridCopula& c, int axis, double new_cut) {
  if (!(new_cut > 0.0 && new_cut < 1.0)) {
    throw std::invalid_argument("grid division: cut must be inside (0,1)");
  }
  const auto& cj = c.cuts[axis];
  auto it = std::lower_bound(cj.begin(), cj.end(), new_cut);
  if (it != cj.end() && *it == new_cut) {
    throw std::invalid_argument("grid division: cut coincides with existing boundary");
  }
  std::int64_t split = (it - cj.begin()) - 1;  // cell being divided
  double lo = cj[split], hi = cj[split + 1];
  double frac_lo = (new_cut - lo) / (hi - lo);

  GridCopula out;
  out.cuts = c.cuts;
  out.cuts[axis].insert(out.cuts[axis].begin() + split + 1, new_cut);

  std::vector<std::int64_t> old_n(c.dim()), new_n(c.dim());
  for (int j = 0; j < c.dim(); ++j) {
    old_n[j] = static_cast<std::int64_t>(c.cuts[j].size()) - 1;
    new_n[j] = old_n[j] + (j == axis ? 1 : 0);
  }
  out.mass.resize(out.cell_count());
  std::vector<std::int64_t> idx(c.dim(), 0);
  for (std::int64_t o = 0; o < c.mass.size(); ++o) {
    // decode old index
    std::int64_t rem = o;
    for (int j = c.dim() - 1; j >= 0; --j) {
      idx[j] = rem % old_n[j];
      rem /= old_n[j];
    }
    auto new_offset = [&](std::int64_t axis_cell) {
      std::int64_t off = 0;
      for (int j = 0; j < c.dim(); ++j) {
        off = off * new_n[j] + (j == axis ? axis_cell : idx[j]);
      }
      return off;
    };
    if (idx[axis] < split) {
      out.mass[new_offset(idx[axis])] = c.mass[o];
    } else if (idx[axis] > split) {
      out.mass[new_offset(idx[axis] + 1)] = c.mass[o];
    } else {
      out.mass[new_offset(split)] = c.mass[o] * frac_lo;
      out.mass[new_offset(split + 1)] = c.mass[o] * (1.0 - frac_lo);
    }
  }
  return out;
}

void write_yett(std::ostream& os, const YettCopula& c) {
  os << c.degree.dim();
  for (int kj : c.degree.k) os << ' ' << kj;
  os << '\n';
  os.precision(17);
  for (std::int64_t i = 0; i < c.mass.size(); ++i) {
    os << c.mass[i] << (i + 1 == c.mass.size() ? '\n' : ' ');
  }
}

YettCopula read_yett(std::istream& is) {
  int d = 0;
  if (!(is >> d) || d < 2) throw std::runtime_error("yett text: bad dimension");
  YettCopula c;
  c.degree.k.resize(d);
  for (int j = 0; j < d; ++j) {
    if (!(is >> c.degree.k[j])) throw std::runtime_error("yett text: bad degree");
  }
  check_degree(c.degree);
  c.mass.resize(c.degree.cell_count());
  for (std::int64_t i = 0; i < c.mass.size(); ++i) {
    if (!(is >> c.mass[i])) throw std::runtime_error("yett text: truncated mass list");
  }
  return c;
}

std::string to_text(const YettCopula& c) {
  std::ostringstream os;
  write_yett(os, c);
  return os.str();
}

YettCopula from_text(const std::string& text) {
  std::istringstream is(text);
  return read_yett(is);
}

}  // namespace byucop
