#pragma once

#include <random>
#include <string>

#include "lmetk/lme.hpp"

namespace lmetk {

struct FdOptions {
  double delta = 1e-4;   // step factor; per-node step is delta*max(1, l_j)
  bool central = false;  // central instead of forward difference
};

struct FdResult {
  Eigen::VectorXd beta;
  std::vector<std::string> node_errors;  // empty string when the node is fine
  int solves = 0;
  bool ok() const;
};

// Finite-difference LME: beta_j = (E(l + d e_j) - E(l)) / d. The base solve
// is reused across nodes (n+1 solves); strict mode re-solves it per node
// (2n solves) for faithful timing comparisons.
FdResult fd_lme(const NetworkCase& net, const Eigen::VectorXd& load,
                const FdOptions& opt = {}, bool strict = false);

// Single-sample sensitivity route: e^T G at this load, no region built.
// Throws DegenerateError (perturb the load and retry) on degenerate samples.
Eigen::VectorXd if_lme(const NetworkCase& net, const Eigen::VectorXd& load);

enum class BenchMethod { RegionLookup, LmpLookup, ImplicitFn, FiniteDiff };
std::string bench_method_name(BenchMethod m);

struct BenchReport {
  BenchMethod method;
  std::vector<double> per_sample_times;  // seconds
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<Eigen::VectorXd> lme_results;
  int mismatch_count = 0;      // vs the region-lookup reference, 1e-4 relative
  long solves_per_sample = 0;  // LP solves, methods that dispatch
};

struct TimingOptions {
  int n_samples = 1000;
  unsigned seed = 1;
  bool strict_fd = false;
  double boundary_margin = 1e-6;  // samples this close to a facet are redrawn
  int warmup = 10;
  int lookup_reps = 64;  // inner repetitions for the sub-microsecond lookups
  FdOptions fd;
};

struct TimingSummary {
  std::vector<BenchReport> reports;  // region, lmp, implicit, fd
  double speedup_region_vs_implicit = 0.0;
  double speedup_lmp_vs_load = 0.0;
  int n_samples = 0;
  bool strict_fd = false;
  std::vector<Eigen::VectorXd> samples;
};

// Per-sample wall-clock comparison of the four lookup methods over a shared
// seeded sample set. Timing loops are single-threaded; warm-up iterations
// are excluded from the statistics.
TimingSummary run_timing(const NetworkCase& net, const RegionDatabase& db,
                         const TimingOptions& opt = {});

struct RobustnessSample {
  Eigen::VectorXd load;
  double actual_emissions = 0.0;
  double frozen_estimate = 0.0;   // base beta applied to the displacement
  double relocated_estimate = 0.0;  // destination-region beta
  bool same_region = false;
  double frozen_rel_error = 0.0;
  double relocated_rel_error = 0.0;
};

struct RobustnessOptions {
  double perturbation = 0.01;
  int n_samples = 1000;
  unsigned seed = 2;
  double error_threshold = 0.005;  // relative emission error counted as "good"
};

struct RobustnessReport {
  std::vector<RobustnessSample> samples;
  double frozen_within_fraction = 0.0;
  double relocated_within_fraction = 0.0;
  double perturbation = 0.0;
  double error_threshold = 0.0;
  Eigen::VectorXd base_load;
  double base_emissions = 0.0;
};

// Perturb the nominal profile and compare emission estimates from a frozen
// base-point LME against the re-located region LME, scored against a fresh
// dispatch solve per sample.
RobustnessReport run_robustness(const NetworkCase& net,
                                const RegionDatabase& db,
                                const RobustnessOptions& opt = {});

// Uniform polytope sample at least `margin` inside the containing region's
// facets; used by agreement sweeps so finite differences never straddle a
// boundary.
Eigen::VectorXd sample_region_interior(const RegionDatabase& db,
                                       std::mt19937_64& rng, double margin);

}  // namespace lmetk
