#include <doctest.h>

#include <sstream>

#include "byucop/yett.hpp"
#include "helpers.hpp"

using namespace byucop;

TEST_CASE("independence copula") {
  YettCopula c = independence({{3, 4}});
  CHECK(c.mass.size() == 12);
  for (Eigen::Index i = 0; i < 12; ++i) CHECK(c.mass[i] == doctest::Approx(1.0 / 12));
  validate(c);

  YettCopula c2 = independence({{2, 2}});
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(c2.mass[i] == doctest::Approx(0.25));

  YettCopula c4 = independence({{5, 5, 5, 5}});
  CHECK(c4.mass.size() == 625);
  CHECK(c4.mass[0] == doctest::Approx(1.0 / 625));
  for (int m = 1; m <= 5; ++m) {
    CHECK(axis_marginal_sum(c4, 0, m) == doctest::Approx(0.2).epsilon(1e-14));
  }
  validate(c4);
}

TEST_CASE("offset and index round-trip") {
  Degree deg{{3, 4, 2}};
  YettCopula c = independence(deg);
  for (std::int64_t o = 0; o < deg.cell_count(); ++o) {
    CellIndex idx = c.index_of(o);
    for (int j = 0; j < 3; ++j) {
      REQUIRE(idx[j] >= 1);
      REQUIRE(idx[j] <= deg.k[j]);
    }
    CHECK(c.offset(idx) == o);
  }
}

TEST_CASE("validation catches violations") {
  YettCopula c = independence({{2, 2}});
  CHECK(is_valid(c));

  YettCopula neg = c;
  neg.mass[0] = -0.01;
  neg.mass[3] += 0.01;
  CHECK_FALSE(is_valid(neg));
  CHECK_THROWS_AS(validate(neg), std::invalid_argument);

  YettCopula unscaled = c;
  unscaled.mass *= 1.5;
  CHECK_FALSE(is_valid(unscaled));

  // total mass 1 but non-uniform marginals
  YettCopula bad = testutil::make2d({{0.5, 0.0}, {0.25, 0.25}});
  CHECK_FALSE(is_valid(bad));
}

TEST_CASE("rectangle exchange bounds") {
  YettCopula ind = independence({{2, 2}});
  RectangleExchange ex;
  ex.anchor = {1, 1};
  ex.a1 = 1;
  ex.a2 = 2;
  ex.b1 = 1;
  ex.b2 = 2;
  auto [lo, hi] = rectangle_exchange_bounds(ind, ex);
  CHECK(lo == doctest::Approx(-0.25));
  CHECK(hi == doctest::Approx(0.25));

  // corners rows (1,2), cols (2,3) of the example matrix
  YettCopula g = testutil::example_g();
  RectangleExchange ex2;
  ex2.anchor = {1, 1};
  ex2.a1 = 1;
  ex2.a2 = 2;
  ex2.b1 = 2;
  ex2.b2 = 3;
  auto [lo2, hi2] = rectangle_exchange_bounds(g, ex2);
  // eps_lo = max{-W(a1,b2), -W(a2,b1)} = -4/24; eps_hi = min{W(a1,b1), W(a2,b2)} = 1/24
  CHECK(lo2 == doctest::Approx(-4.0 / 24).epsilon(1e-14));
  CHECK(hi2 == doctest::Approx(1.0 / 24).epsilon(1e-14));

  // zero at (a1, b1) pins the upper bound at 0
  YettCopula z = testutil::make2d({{0.5, 0.0}, {0.0, 0.5}});
  RectangleExchange ex3;
  ex3.anchor = {1, 1};
  ex3.a1 = 1;
  ex3.a2 = 2;
  ex3.b1 = 2;  // cell (1,2) = 0
  ex3.b2 = 1;
  auto [lo3, hi3] = rectangle_exchange_bounds(z, ex3);
  CHECK(hi3 <= 0.0);

  RectangleExchange degenerate = ex;
  degenerate.a2 = degenerate.a1;
  CHECK_THROWS_AS(rectangle_exchange_bounds(ind, degenerate), std::invalid_argument);
}

TEST_CASE("apply rectangle exchange") {
  YettCopula ind = independence({{2, 2}});
  RectangleExchange ex;
  ex.anchor = {1, 1};
  ex.a1 = 1;
  ex.a2 = 2;
  ex.b1 = 1;
  ex.b2 = 2;

  YettCopula same = apply_rectangle_exchange(ind, ex, 0.0);
  CHECK((same.mass - ind.mass).cwiseAbs().maxCoeff() == 0.0);

  // positive eps drains the (a1,b1) and (a2,b2) corners
  YettCopula diag = apply_rectangle_exchange(ind, ex, 0.25);
  CHECK(diag.cell({1, 1}) == doctest::Approx(0.0));
  CHECK(diag.cell({1, 2}) == doctest::Approx(0.5));
  CHECK(diag.cell({2, 1}) == doctest::Approx(0.5));
  CHECK(diag.cell({2, 2}) == doctest::Approx(0.0));
  validate(diag);

  CHECK_THROWS_AS(apply_rectangle_exchange(ind, ex, 0.3), std::invalid_argument);
}

TEST_CASE("closure under random exchanges") {
  Rng rng(101);
  for (Degree deg : {Degree{{3, 4}}, Degree{{2, 2}}, Degree{{3, 3, 3}}}) {
    YettCopula c = independence(deg);
    for (int i = 0; i < 10000; ++i) {
      c = propose_ire(c, 1, rng).candidate;
    }
    validate(c);
  }
}

TEST_CASE("k=(2,2) reachability") {
  // one-parameter family: cell (1,1) ranges over [0, 1/2]
  Rng rng(55);
  YettCopula c = independence({{2, 2}});
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    c = propose_ire(c, 1, rng).candidate;
    lo = std::min(lo, c.mass[0]);
    hi = std::max(hi, c.mass[0]);
  }
  CHECK(lo < 1e-3);
  CHECK(hi > 0.5 - 1e-3);
}

TEST_CASE("grid division") {
  YettCopula ind = independence({{2, 2}});
  GridCopula g = to_grid_copula(ind);
  GridCopula div = grid_division(g, 0, 0.25);
  CHECK(div.cuts[0].size() == 4);  // 0, 0.25, 0.5, 1
  // the first row of cells splits 1/8 + 1/8 per column
  CHECK(div.mass[0] == doctest::Approx(0.125));
  CHECK(div.mass[2] == doctest::Approx(0.125));
  CHECK(div.mass.sum() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(grid_division(g, 0, 0.5), std::invalid_argument);

  // piecewise density is unchanged
  Rng rng(3);
  YettCopula c = testutil::random_copula({{3, 4}}, 50, rng);
  GridCopula before = to_grid_copula(c);
  GridCopula after = grid_division(grid_division(before, 0, 0.1), 1, 0.6);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> z = {rng.uniform(), rng.uniform()};
    CHECK(before.density(z) == doctest::Approx(after.density(z)).epsilon(1e-14));
  }
}

TEST_CASE("text serialization round trip") {
  Rng rng(17);
  YettCopula c = testutil::random_copula({{3, 4}}, 200, rng);
  std::string text = to_text(c);
  YettCopula back = from_text(text);
  CHECK(back.degree == c.degree);
  REQUIRE(back.mass.size() == c.mass.size());
  for (Eigen::Index i = 0; i < c.mass.size(); ++i) CHECK(back.mass[i] == c.mass[i]);

  std::stringstream ss;
  write_yett(ss, c);
  YettCopula back2 = read_yett(ss);
  CHECK((back2.mass - c.mass).cwiseAbs().maxCoeff() == 0.0);
}
