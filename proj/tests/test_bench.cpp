#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lmetk/bench.hpp"
#include "lmetk/errors.hpp"
#include "support/cases.hpp"

using namespace lmetk;

TEST_CASE("finite differences recover the region LME away from boundaries") {
  NetworkCase net = testcases::two_bus();

  FdResult unc = fd_lme(net, Eigen::Vector2d(0.0, 20.0));
  REQUIRE(unc.ok());
  CHECK(unc.beta(0) == doctest::Approx(1000.0).epsilon(1e-6));
  CHECK(unc.beta(1) == doctest::Approx(1000.0).epsilon(1e-6));

  FdResult con = fd_lme(net, Eigen::Vector2d(0.0, 40.0));
  REQUIRE(con.ok());
  CHECK(con.beta(0) == doctest::Approx(1000.0).epsilon(1e-6));
  CHECK(con.beta(1) == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("zero emission rates give zero LME") {
  std::string s = testcases::two_bus_json();
  while (s.find("emission_rate\": 1000.0") != std::string::npos)
    s.replace(s.find("emission_rate\": 1000.0"), 22, "emission_rate\": 0.0");
  while (s.find("emission_rate\": 12.0") != std::string::npos)
    s.replace(s.find("emission_rate\": 12.0"), 20, "emission_rate\": 0.0");
  NetworkCase net = parse_case(s);
  FdResult fd = fd_lme(net, Eigen::Vector2d(0.0, 20.0));
  REQUIRE(fd.ok());
  CHECK(fd.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fd solve accounting: base reuse vs strict mode vs central") {
  NetworkCase net = testcases::two_bus();
  const Eigen::Vector2d l(5.0, 20.0);  // strictly positive for central steps
  CHECK(fd_lme(net, l, {}, false).solves == net.n_buses + 1);
  CHECK(fd_lme(net, l, {}, true).solves == 2 * net.n_buses);
  FdOptions central;
  central.central = true;
  CHECK(fd_lme(net, l, central, false).solves == 2 * net.n_buses);
}

TEST_CASE("central differencing needs room below; errors are per node") {
  NetworkCase net = testcases::two_bus();
  FdOptions central;
  central.central = true;
  // l_1 = 0 cannot take a downward step
  FdResult fd = fd_lme(net, Eigen::Vector2d(0.0, 20.0), central);
  CHECK_FALSE(fd.node_errors[0].empty());
  CHECK(fd.node_errors[1].empty());
  CHECK(std::isnan(fd.beta(0)));
  CHECK(fd.beta(1) == doctest::Approx(1000.0).epsilon(1e-6));
}

TEST_CASE("per-node infeasibility is reported, not thrown") {
  NetworkCase net = testcases::two_bus();
  // Load right at the deliverable limit: any upward step is infeasible.
  FdResult fd = fd_lme(net, Eigen::Vector2d(0.0, 130.0));
  CHECK_FALSE(fd.ok());
  CHECK_FALSE(fd.node_errors[1].empty());
}

TEST_CASE("implicit-function route equals the stored region LME") {
  NetworkCase net = testcases::two_bus();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));
  CHECK((if_lme(net, Eigen::Vector2d(0.0, 20.0)) -
         Eigen::Vector2d(1000.0, 1000.0))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
  CHECK((if_lme(net, Eigen::Vector2d(0.0, 40.0)) - Eigen::Vector2d(1000.0, 12.0))
            .cwiseAbs()
            .maxCoeff() < 1e-9);

  std::mt19937_64 rng(3);
  for (int s = 0; s < 25; ++s) {
    const Eigen::VectorXd l = sample_region_interior(db, rng, 1e-4);
    const PriceEmissionPair pe = lme_for_load(db, l);
    CHECK((if_lme(net, l) - pe.beta).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("degenerate samples raise with advice to perturb") {
  NetworkCase net = testcases::two_bus();
  CHECK_THROWS_WITH_AS(if_lme(net, Eigen::Vector2d(0.0, 30.0)),
                       doctest::Contains("perturb"), DegenerateError);
}

TEST_CASE("three methods agree on interior samples") {
  NetworkCase net = testcases::five_bus();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));
  std::mt19937_64 rng(9);
  FdOptions fdo;
  for (int s = 0; s < 40; ++s) {
    // margin larger than the fd step so differencing stays in-region
    const Eigen::VectorXd l = sample_region_interior(db, rng, 0.05);
    const Eigen::VectorXd region_beta = lme_for_load(db, l).beta;
    const Eigen::VectorXd imp = if_lme(net, l);
    const FdResult fd = fd_lme(net, l, fdo);
    REQUIRE(fd.ok());
    const double scale = std::max(1.0, region_beta.cwiseAbs().maxCoeff());
    CHECK((imp - region_beta).cwiseAbs().maxCoeff() < 1e-9 * scale);
    CHECK((fd.beta - region_beta).cwiseAbs().maxCoeff() < 1e-4 * scale);
  }
}

TEST_CASE("timing runs are seeded deterministically and keep the ordinal") {
  NetworkCase net = testcases::five_bus();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));
  TimingOptions opt;
  opt.n_samples = 120;
  TimingSummary a = run_timing(net, db, opt);
  TimingSummary b = run_timing(net, db, opt);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i)
    CHECK((a.samples[i] - b.samples[i]).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE(a.reports.size() == 4);
  const auto& region = a.reports[0];
  const auto& lmp = a.reports[1];
  const auto& implicit = a.reports[2];
  const auto& fd = a.reports[3];
  CHECK(fd.mean > implicit.mean);
  CHECK(implicit.mean > region.mean);
  CHECK(region.mean > lmp.mean);
  CHECK(implicit.mismatch_count == 0);

  // stored statistics match a recomputation from the raw times
  double sum = 0.0;
  for (double t : region.per_sample_times) sum += t;
  CHECK(region.mean == doctest::Approx(sum / region.per_sample_times.size()));

  CHECK_THROWS_AS(run_timing(net, db, TimingOptions{.n_samples = 50}),
                  ValidationError);
}

TEST_CASE("zero perturbation robustness is exact for every sample") {
  NetworkCase net = testcases::five_bus();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));
  RobustnessOptions opt;
  opt.perturbation = 0.0;
  opt.n_samples = 30;
  RobustnessReport rep = run_robustness(net, db, opt);
  CHECK(rep.frozen_within_fraction == doctest::Approx(1.0));
  CHECK(rep.relocated_within_fraction == doctest::Approx(1.0));
}

TEST_CASE("in-region perturbations are estimated exactly by both methods") {
  NetworkCase net = testcases::five_bus();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));
  RobustnessOptions opt;
  opt.perturbation = 0.01;
  opt.n_samples = 200;
  RobustnessReport rep = run_robustness(net, db, opt);
  int same = 0;
  for (const auto& s : rep.samples) {
    if (!s.same_region) continue;
    ++same;
    CHECK(s.frozen_rel_error <= 1e-6);
    CHECK(s.relocated_rel_error <= 1e-6);
  }
  CHECK(same > 0);
}

TEST_CASE("crossing a boundary: relocated beta beats the frozen gradient") {
  // Base point just below the two-bus congestion threshold, perturbation
  // well past it: the frozen gradient (1000) grossly overestimates, the
  // destination-region gradient (12) nearly matches.
  NetworkCase net = testcases::two_bus();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));

  const Eigen::Vector2d base(0.0, 29.9), moved(0.0, 36.0);
  const double e_base = solve_sced(net, base).emissions;
  const double truth = solve_sced(net, moved).emissions;
  const Eigen::VectorXd frozen_beta = if_lme(net, base);
  const Eigen::VectorXd dl = moved - base;
  const double frozen_est = e_base + frozen_beta.dot(dl);
  const double relocated_est =
      e_base + db.regions[locate(db, moved)].beta.dot(dl);
  CHECK(locate(db, base) != locate(db, moved));
  CHECK(std::abs(relocated_est - truth) < std::abs(frozen_est - truth));
}

TEST_CASE("robustness fractions are reported against the dispatch truth") {
  NetworkCase net = testcases::three_bus_ring();
  RegionDatabase db = enumerate_regions(net, case_polytope(net));
  RobustnessOptions opt;
  opt.perturbation = 0.01;
  opt.n_samples = 100;
  RobustnessReport rep = run_robustness(net, db, opt);
  CHECK(rep.samples.size() == 100);
  CHECK(rep.relocated_within_fraction >= rep.frozen_within_fraction - 1e-12);
  for (const auto& s : rep.samples) {
    const double scale = std::max(1.0, std::abs(s.actual_emissions));
    CHECK(s.frozen_rel_error ==
          doctest::Approx(std::abs(s.frozen_estimate - s.actual_emissions) /
                          scale));
  }
}
