#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "lmetk/errors.hpp"
#include "lmetk/lme.hpp"
#include "lmetk/regions.hpp"
#include "support/cases.hpp"

using namespace lmetk;

namespace {

RegionDatabase build_db(const NetworkCase& net, int workers = 1) {
  EnumerateOptions opt;
  opt.workers = workers;
  return enumerate_regions(net, case_polytope(net), opt);
}

Eigen::VectorXd fd_probe(const NetworkCase& net, const Eigen::VectorXd& l,
                         double step = 1e-5) {
  // local forward difference on the dispatch emissions, for G cross-checks
  const double base = solve_sced(net, l).emissions;
  Eigen::VectorXd beta(net.n_buses);
  for (int j = 0; j < net.n_buses; ++j) {
    Eigen::VectorXd up = l;
    up(j) += step;
    beta(j) = (solve_sced(net, up).emissions - base) / step;
  }
  return beta;
}

// Interior membership with margin, ignoring pinned (frozen) directions whose
// facet slack is identically zero.
bool interior_of(const CriticalRegion& region, const Eigen::VectorXd& l,
                 const std::vector<int>& free_dims, double margin) {
  for (const auto& th : region.halfspaces) {
    double free_part = 0.0;
    for (int j : free_dims) free_part += std::abs(th.hs.normal(j));
    if (free_part <= 1e-12) {
      if (th.hs.normal.dot(l) > th.hs.offset + 1e-9) return false;
      continue;
    }
    if (th.hs.normal.dot(l) > th.hs.offset - margin) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("two-bus sensitivities match the hand-derived policies") {
  NetworkCase net = testcases::two_bus();
  CompactForm cf = build_compact(net);

  // Uncongested: G1 absorbs all load changes.
  Eigen::Vector2d l1(0.0, 20.0);
  DispatchSolution s1 = solve_sced(net, l1);
  SensitivityMatrix m1 = sensitivity_at(cf, s1, l1);
  CHECK(m1.G(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m1.G(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m1.G(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m1.G(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  // dual sensitivities vanish for a right-hand-side parametric LP
  CHECK(m1.dLambda.cwiseAbs().maxCoeff() < 1e-9);

  // Congested: the line constraint pins G1's response to bus-0 load.
  Eigen::Vector2d l2(0.0, 40.0);
  DispatchSolution s2 = solve_sced(net, l2);
  SensitivityMatrix m2 = sensitivity_at(cf, s2, l2);
  CHECK((m2.G - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);

  // FD confirmation of dx/dl via emissions (e picks out the rows).
  const Eigen::VectorXd fd = fd_probe(net, l2);
  const Eigen::VectorXd beta =
      (net.emission_vector().transpose() * m2.G).transpose();
  CHECK((fd - beta).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("bound-active generators have zero sensitivity rows") {
  NetworkCase net = testcases::three_bus_ring();
  // High load: wind marginal, coal pinned by the line.
  Eigen::Vector3d l(5.0, 30.0, 0.0);
  DispatchSolution sol = solve_sced(net, l);
  CompactForm cf = build_compact(net);
  SensitivityMatrix m = sensitivity_at(cf, sol, l);
  for (int i : sol.active_set) {
    if (cf.row_kind[i] == RowKind::GenUpper || cf.row_kind[i] == RowKind::GenLower)
      CHECK(m.G.row(cf.row_item[i]).cwiseAbs().maxCoeff() < 1e-12);
  }
  // every column responds one-for-one in aggregate
  for (int j = 0; j < 3; ++j)
    CHECK(m.G.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate points are rejected with their signature") {
  NetworkCase net = testcases::two_bus();
  CompactForm cf = build_compact(net);
  Eigen::Vector2d l(0.0, 30.0);  // exactly at the congestion threshold
  DispatchSolution sol = solve_sced(net, l);
  REQUIRE(sol.degenerate);
  CHECK_THROWS_AS(sensitivity_at(cf, sol, l), DegenerateError);
}

TEST_CASE("two-bus region boundary is the congestion hyperplane") {
  NetworkCase net = testcases::two_bus();
  RegionDatabase db = build_db(net);
  REQUIRE(db.regions.size() == 2);

  // Region 0: G2 at zero (signature row 3); boundary l_1 <= 30 from the
  // line-upper row.
  const CriticalRegion& r0 = db.regions[0];
  CHECK(r0.active_signature == std::vector<int>{3});
  bool found_boundary = false;
  for (const auto& th : r0.halfspaces) {
    if (th.source != HsSource::Row) continue;
    if (th.row == 4) {
      found_boundary = true;
      CHECK(th.hs.normal(0) == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(th.hs.normal(1) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(th.hs.offset == doctest::Approx(30.0).epsilon(1e-12));
    }
  }
  CHECK(found_boundary);
  CHECK(db.regions[1].active_signature == std::vector<int>{4});
}

TEST_CASE("polytope inside one region reduces to the box rows") {
  std::string s = testcases::two_bus_json();
  s.replace(s.find("\"omega\": 0.5"), 12, "\"omega\": 0.02");  // [27.44, 28.56]
  NetworkCase net = parse_case(s);
  RegionDatabase db = build_db(net);
  REQUIRE(db.regions.size() == 1);
  for (const auto& th : db.regions[0].halfspaces)
    CHECK(th.source == HsSource::Box);
  // one pinned dimension (two rows) + the free interval (two rows)
  CHECK(db.regions[0].halfspaces.size() == 4);
}

TEST_CASE("define_region drops a deliberately duplicated halfspace") {
  NetworkCase net = testcases::two_bus();
  CompactForm cf = build_compact(net);
  LoadPolytope poly = case_polytope(net);
  Eigen::Vector2d l(0.0, 20.0);
  DispatchSolution sol = solve_sced(net, l);
  SensitivityMatrix sens = sensitivity_at(cf, sol, l);

  auto clean = define_region(cf, net.cost_vector(), sens, sol, l, poly);
  REQUIRE(clean.has_value());

  LoadPolytope padded = poly;  // duplicate box facet as an extra halfspace
  Halfspace dup;
  dup.normal = Eigen::VectorXd::Zero(2);
  dup.normal(1) = 1.0;
  dup.offset = poly.upper()(1);
  padded.extra.push_back(dup);
  auto same = define_region(cf, net.cost_vector(), sens, sol, l, padded);
  REQUIRE(same.has_value());
  CHECK(same->halfspaces.size() == clean->halfspaces.size());
}

TEST_CASE("two-bus box spanning the threshold yields exactly two regions") {
  NetworkCase net = testcases::two_bus();
  RegionDatabase db = build_db(net);
  CHECK(db.regions.size() == 2);
  CHECK(db.stats.explored_volume_fraction == doctest::Approx(1.0));
  CHECK_FALSE(db.stats.incomplete);
}

TEST_CASE("point polytope (omega = 0) produces a single region") {
  std::string s = testcases::two_bus_json();
  s.replace(s.find("\"omega\": 0.5"), 12, "\"omega\": 0.0");
  NetworkCase net = parse_case(s);
  RegionDatabase db = build_db(net);
  CHECK(db.regions.size() == 1);
  CHECK(locate(db, net.nominal_load) == 0);
}

TEST_CASE("region cap returns a partial database flagged incomplete") {
  NetworkCase net = testcases::two_bus();
  EnumerateOptions opt;
  opt.region_cap = 1;
  RegionDatabase db = enumerate_regions(net, case_polytope(net), opt);
  CHECK(db.stats.incomplete);
  CHECK(db.regions.size() == 1);
}

TEST_CASE("infeasible nominal load raises") {
  std::string s = testcases::two_bus_json();
  s.replace(s.find("\"nominal_load\": [0.0, 28.0]"), 27,
            "\"nominal_load\": [0.0, 250.0]");
  NetworkCase net = parse_case(s);
  CHECK_THROWS_AS(enumerate_regions(net, case_polytope(net)),
                  InfeasibleError);
}

TEST_CASE("fourteen-bus-class enumeration stays small and complete") {
  NetworkCase net = testcases::fourteen_bus();
  RegionDatabase db = build_db(net, 2);
  CHECK(db.regions.size() >= 2);
  CHECK(db.regions.size() <= 40);  // order of magnitude, not an exact count
  CHECK(db.stats.explored_volume_fraction >= 0.995);
  CHECK_FALSE(db.stats.incomplete);
}

TEST_CASE("affine policy reproduces fresh solves across each region") {
  for (const NetworkCase& net :
       {testcases::two_bus(), testcases::three_bus_ring(),
        testcases::five_bus()}) {
    RegionDatabase db = build_db(net);
    std::mt19937_64 rng(5);
    const auto free_dims = db.polytope.free_dims();
    const Eigen::VectorXd lo = db.polytope.lower(), up = db.polytope.upper();
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (const auto& region : db.regions) {
      int tested = 0;
      for (int draw = 0; draw < 40000 && tested < 100; ++draw) {
        Eigen::VectorXd l = db.polytope.nominal;
        for (int j : free_dims) l(j) = lo(j) + uni(rng) * (up(j) - lo(j));
        if (!interior_of(region, l, free_dims, 1e-6)) continue;
        ++tested;
        const Eigen::VectorXd predicted =
            region.x_anchor + region.G * (l - region.l_anchor);
        DispatchSolution sol = solve_sced(net, l);
        CHECK((predicted - sol.x).cwiseAbs().maxCoeff() < 1e-7);
        const double pred_cost = net.cost_vector().dot(predicted);
        CHECK(std::abs(pred_cost - sol.cost) <=
              1e-8 * (1.0 + std::abs(sol.cost)));
      }
      CHECK(tested == 100);
    }
  }
}

TEST_CASE("G columns sum to one across all regions") {
  for (const NetworkCase& net :
       {testcases::two_bus(), testcases::three_bus_ring(),
        testcases::five_bus(), testcases::fourteen_bus(),
        testcases::collision()}) {
    RegionDatabase db = build_db(net);
    for (const auto& region : db.regions)
      for (int j = 0; j < net.n_buses; ++j)
        CHECK(std::abs(region.G.col(j).sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("regions partition the polytope") {
  NetworkCase net = testcases::five_bus();
  RegionDatabase db = build_db(net);

  std::set<std::vector<int>> sigs;
  for (const auto& r : db.regions) sigs.insert(r.active_signature);
  CHECK(sigs.size() == db.regions.size());  // pairwise distinct signatures

  std::mt19937_64 rng(31);
  const auto free_dims = db.polytope.free_dims();
  const Eigen::VectorXd lo = db.polytope.lower(), up = db.polytope.upper();
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int exactly_one = 0, two_interiors = 0;
  const int n_samples = 10000;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd l = db.polytope.nominal;
    for (int j : free_dims) l(j) = lo(j) + uni(rng) * (up(j) - lo(j));
    int members = 0, interiors = 0;
    for (const auto& r : db.regions) {
      if (r.contains(l, 1e-9)) ++members;
      if (r.contains(l, -1e-9)) ++interiors;
    }
    if (members == 1) ++exactly_one;
    if (interiors > 1) ++two_interiors;
  }
  CHECK(exactly_one >= n_samples * 999 / 1000);
  CHECK(two_interiors == 0);
}

TEST_CASE("dual policy stays nonnegative over each region") {
  NetworkCase net = testcases::fourteen_bus();
  RegionDatabase db = build_db(net);
  for (const auto& region : db.regions) {
    CHECK(region.lambda_anchor.minCoeff() >= -1e-7);
    CHECK(region.dLambda.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("a partially dispatchable box is carved, not fatal") {
  // Shrinking the clean unit to 10 MW caps deliverable bus-1 load at 40 MW,
  // inside the [14, 42] box: the top strip is infeasible.
  std::string s = testcases::two_bus_json();
  const std::string cap = "\"emission_rate\": 12.0, \"capacity\": 100.0";
  s.replace(s.find(cap), cap.size(),
            "\"emission_rate\": 12.0, \"capacity\": 10.0");
  NetworkCase net = parse_case(s);
  RegionDatabase db = build_db(net);
  CHECK(db.regions.size() == 2);
  CHECK(db.stats.infeasible_probes >= 1);
  CHECK_FALSE(db.stats.incomplete);
  CHECK(db.stats.explored_volume_fraction >= 0.995);
  CHECK(locate(db, Eigen::Vector2d(0.0, 39.0)) == 1);
  CHECK_THROWS_AS(locate(db, Eigen::Vector2d(0.0, 41.0)), LocateError);
}

TEST_CASE("an everywhere-degenerate case terminates with flagged slivers") {
  // Exactly equal-cost generators at one bus make every interior point dual
  // degenerate; the probes give up instead of inventing a sensitivity.
  std::string s = testcases::collision_json();
  s.replace(s.find("10.0000001"), 10, "10.0000000");
  NetworkCase net = parse_case(s);
  RegionDatabase db = build_db(net);
  CHECK(db.regions.empty());
  CHECK(db.stats.degenerate_count >= 1);
}

TEST_CASE("extra polytope halfspaces bound the enumeration") {
  NetworkCase net = testcases::five_bus();
  LoadPolytope poly = case_polytope(net);
  Halfspace cut;
  cut.normal = Eigen::VectorXd::Zero(5);
  cut.normal(1) = 1.0;
  cut.normal(2) = 1.0;
  cut.offset = 70.0;  // inside the box's reach of 91
  poly.extra.push_back(cut);
  RegionDatabase db = enumerate_regions(net, poly);
  CHECK(db.regions.size() >= 1);
  CHECK(db.stats.explored_volume_fraction >= 0.995);
  for (const auto& region : db.regions)
    CHECK(region.l_anchor(1) + region.l_anchor(2) <= 70.0 + 1e-9);
  CHECK_THROWS_AS(locate(db, Eigen::VectorXd::Zero(2)),
                  ValidationError);  // wrong dimension
}

TEST_CASE("worker pool does not change the result") {
  NetworkCase net = testcases::five_bus();
  RegionDatabase a = build_db(net, 1);
  RegionDatabase b = build_db(net, 4);
  REQUIRE(a.regions.size() == b.regions.size());
  for (size_t i = 0; i < a.regions.size(); ++i) {
    CHECK(a.regions[i].active_signature == b.regions[i].active_signature);
    CHECK((a.regions[i].G - b.regions[i].G).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.regions[i].l_anchor - b.regions[i].l_anchor)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}
