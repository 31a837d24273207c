#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lmetk/errors.hpp"
#include "lmetk/geometry.hpp"
#include "lmetk/simplex.hpp"

using namespace lmetk;

namespace {

Halfspace hs(std::initializer_list<double> normal, double offset) {
  Halfspace h;
  h.normal = Eigen::VectorXd(normal.size());
  int i = 0;
  for (double v : normal) h.normal(i++) = v;
  h.offset = offset;
  return h;
}

}  // namespace

TEST_CASE("chebyshev center of a box") {
  std::vector<Halfspace> box = {hs({1, 0}, 3), hs({-1, 0}, 1), hs({0, 1}, 2),
                                hs({0, -1}, 0)};
  ChebyshevResult c = chebyshev_center(box, 2);
  REQUIRE(c.feasible);
  CHECK(c.radius == doctest::Approx(1.0));
  CHECK(c.center(0) >= -1.0 + c.radius - 1e-9);
  CHECK(c.center(1) == doctest::Approx(1.0));
}

TEST_CASE("chebyshev center detects empty sets") {
  std::vector<Halfspace> empty = {hs({1}, 1), hs({-1}, -3)};
  CHECK_FALSE(chebyshev_center(empty, 1).feasible);
}

TEST_CASE("chebyshev center respects frozen dimensions") {
  // 2-D halfspaces but only dim 1 free; dim 0 pinned at 5.
  std::vector<Halfspace> rows = {hs({1, 1}, 9), hs({0, -1}, 0),
                                 hs({1, 0}, 6)};
  Eigen::VectorXd frozen(2);
  frozen << 5.0, 0.0;
  ChebyshevResult c = chebyshev_center(rows, {1}, frozen);
  REQUIRE(c.feasible);
  CHECK(c.center(0) == 5.0);
  CHECK(c.center(1) == doctest::Approx(2.0));  // midpoint of [0, 4]
  CHECK(c.radius == doctest::Approx(2.0));

  // frozen value violating a constant row -> infeasible
  frozen(0) = 7.0;
  CHECK_FALSE(chebyshev_center(rows, {1}, frozen).feasible);
}

TEST_CASE("zero free dimensions: the point itself") {
  std::vector<Halfspace> rows = {hs({1}, 2)};
  Eigen::VectorXd pt(1);
  pt << 1.5;
  ChebyshevResult c = chebyshev_center(rows, {}, pt);
  REQUIRE(c.feasible);
  CHECK(std::isinf(c.radius));
  CHECK(c.center(0) == 1.5);
}

TEST_CASE("dominated one-dimensional constraint is removed") {
  std::vector<Halfspace> rows = {hs({1}, 1), hs({1}, 2), hs({-1}, 0)};
  auto kept = remove_redundant(rows, 1);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].offset == 1.0);
  CHECK(kept[1].offset == 0.0);
}

TEST_CASE("slack constraint over the unit box is removed") {
  std::vector<Halfspace> rows = {hs({1, 0}, 1),  hs({-1, 0}, 0),
                                 hs({0, 1}, 1),  hs({0, -1}, 0),
                                 hs({1, 1}, 10)};
  auto kept = remove_redundant(rows, 2);
  CHECK(kept.size() == 4);
  for (const auto& h : kept) CHECK(h.offset <= 1.0);
}

TEST_CASE("duplicate halfspaces collapse to one; reduction is idempotent") {
  std::vector<Halfspace> rows = {hs({1, 0}, 1),  hs({-1, 0}, 0),
                                 hs({0, 1}, 1),  hs({0, -1}, 0)};
  auto clean = remove_redundant(rows, 2);
  CHECK(clean.size() == 4);

  auto dup = rows;
  dup.insert(dup.begin(), hs({1, 0}, 1));  // exact duplicate
  auto kept = remove_redundant(dup, 2);
  CHECK(kept.size() == clean.size());
}

TEST_CASE("empty interior raises") {
  std::vector<Halfspace> flat = {hs({1, 0}, 1), hs({-1, 0}, -1),
                                 hs({0, 1}, 1), hs({0, -1}, 0)};
  CHECK_THROWS_AS(remove_redundant(flat, 2), DegenerateError);
}

TEST_CASE("random polygons: per-row LP essentiality verified") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    // Five random halfspaces around the origin plus one forced-redundant row
    // (a copy of row 0 with a larger offset).
    std::vector<Halfspace> rows;
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd nrm(2);
      nrm << std::cos(2 * M_PI * i / 5.0 + 0.3 * uni(rng)),
          std::sin(2 * M_PI * i / 5.0 + 0.3 * uni(rng));
      rows.push_back(Halfspace{nrm, 1.0 + 0.5 * uni(rng)});
    }
    Halfspace forced = rows[0];
    forced.offset += 1.0;
    rows.push_back(forced);

    auto kept = remove_redundant(rows, 2);
    CHECK(kept.size() <= 5);

    // Oracle: each retained row must be improvable beyond its offset when
    // maximized over the other retained rows.
    SimplexSolver solver;
    for (size_t r = 0; r < kept.size(); ++r) {
      LpProblem lp;
      lp.cost = -kept[r].normal;
      const int ni = static_cast<int>(kept.size());
      lp.ineq_A.resize(ni, 2);
      lp.ineq_b.resize(ni);
      int row = 0;
      for (size_t o = 0; o < kept.size(); ++o) {
        if (o == r) {
          lp.ineq_A.row(row) = kept[r].normal.transpose();
          lp.ineq_b(row) = kept[r].offset + 1.0;  // cap
        } else {
          lp.ineq_A.row(row) = kept[o].normal.transpose();
          lp.ineq_b(row) = kept[o].offset;
        }
        ++row;
      }
      lp.eq_A = Eigen::MatrixXd::Zero(0, 2);
      lp.eq_b = Eigen::VectorXd::Zero(0);
      lp.lower = Eigen::VectorXd::Constant(2, -kInf);
      lp.upper = Eigen::VectorXd::Constant(2, kInf);
      LpSolution s = solver.solve(lp);
      REQUIRE(s.status == LpStatus::Optimal);
      CHECK(-s.objective > kept[r].offset + 1e-9);
    }
  }
}
