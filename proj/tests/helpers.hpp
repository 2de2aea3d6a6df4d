#ifndef BYUCOP_TESTS_HELPERS_HPP_
#define BYUCOP_TESTS_HELPERS_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "byucop/math.hpp"
#include "byucop/proposals.hpp"
#include "byucop/yett.hpp"

namespace testutil {

// Row-major d=2 copula from a nested initializer (rows = axis 1).
inline byucop::YettCopula make2d(const std::vector<std::vector<double>>& rows) {
  byucop::YettCopula c;
  c.degree.k = {static_cast<int>(rows.size()), static_cast<int>(rows[0].size())};
  c.mass.resize(c.degree.cell_count());
  Eigen::Index o = 0;
  for (const auto& r : rows) {
    for (double v : r) c.mass[o++] = v;
  }
  return c;
}

// The k=(3,4) example state used throughout the proposal illustrations.
inline byucop::YettCopula example_g() {
  return make2d({{1.0 / 24, 1.0 / 24, 4.0 / 24, 2.0 / 24},
                 {2.0 / 24, 4.0 / 24, 1.0 / 24, 1.0 / 24},
                 {3.0 / 24, 1.0 / 24, 1.0 / 24, 3.0 / 24}});
}

// A valid random state: independence pushed through n random exchanges.
inline byucop::YettCopula random_copula(const byucop::Degree& deg, int n, byucop::Rng& rng) {
  byucop::YettCopula c = byucop::independence(deg);
  for (int i = 0; i < n; ++i) {
    c = byucop::propose_ire(c, 1, rng).candidate;
  }
  return c;
}

// Kolmogorov distance between a sample and a numeric CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  const double n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(i / n - f));
  }
  return d;
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(const std::vector<double>& v) {
  double m = sample_mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace testutil

#endif  // BYUCOP_TESTS_HELPERS_HPP_
