#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmetk/geometry.hpp"
#include "lmetk/lp_core.hpp"
#include "lmetk/sensitivity.hpp"

namespace lmetk {

enum class HsSource { Box, Extra, Row };

struct TaggedHalfspace {
  Halfspace hs;
  HsSource source = HsSource::Row;
  int row = -1;  // compact-form row for HsSource::Row
};

// Maximal load set over which one active set stays optimal. The stored
// policy is x(l) = x_anchor + G (l - l_anchor), valid and optimal on the
// whole region. All fields are canonical functions of (case, signature):
// rebuilding the database reproduces them bit-for-bit.
struct CriticalRegion {
  int id = -1;
  std::vector<int> active_signature;       // tight inequality rows, ascending
  std::vector<TaggedHalfspace> halfspaces; // irredundant, plus frozen-dim pins
  Eigen::MatrixXd G;        // g x n
  Eigen::MatrixXd dLambda;  // p x n
  Eigen::VectorXd x_anchor, l_anchor, lambda_anchor;
  double mu_anchor = 0.0;
  Eigen::VectorXd alpha;  // currency/MW
  Eigen::VectorXd beta;   // kgCO2/MW
  bool degenerate = false;

  bool contains(const Eigen::VectorXd& l, double tol = 1e-9) const;
  // Negative max slack when inside; used for interior tests and diagnostics.
  double max_violation(const Eigen::VectorXd& l) const;
};

struct BuildStats {
  int regions_found = 0;
  int degenerate_count = 0;   // probes skipped after perturbation retries
  int infeasible_probes = 0;  // probes carved away by Farkas certificates
  int spurious_regions = 0;   // lower-dimensional signatures rejected
  int probes = 0;
  double explored_volume_fraction = 0.0;
  bool incomplete = false;
};

struct RegionDatabase {
  std::string case_fingerprint;
  LoadPolytope polytope;
  std::vector<CriticalRegion> regions;
  BuildStats stats;

  int n_buses() const {
    return static_cast<int>(polytope.nominal.size());
  }
};

struct EnumerateOptions {
  int region_cap = 10000;
  int workers = 1;
  unsigned seed = 0;
  int volume_samples = 4096;
  double chebyshev_tol = 1e-7;  // full-dimensionality threshold, MW
  int degenerate_retries = 5;
  ScedTolerances sced;
};

// Build the region for one solved, nondegenerate anchor point: inactive-row
// feasibility of the affine policy intersected with the polytope, then
// redundancy removal. Returns nullopt for an empty or lower-dimensional
// (spurious) region.
std::optional<CriticalRegion> define_region(const CompactForm& compact,
                                            const Eigen::VectorXd& cost,
                                            const SensitivityMatrix& sens,
                                            const DispatchSolution& anchor_sol,
                                            const Eigen::VectorXd& anchor_load,
                                            const LoadPolytope& polytope,
                                            double chebyshev_tol = 1e-7);

// Enumerate every full-dimensional critical region of the polytope by
// exploring the set difference of the polytope and the regions found so far.
// Regions are reported sorted by active signature with ids 0..K-1; repeated
// builds with identical inputs produce identical databases.
RegionDatabase enumerate_regions(const NetworkCase& net,
                                 const LoadPolytope& polytope,
                                 const EnumerateOptions& opt = {});

}  // namespace lmetk
