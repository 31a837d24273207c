#pragma once

#include "lmetk/regions.hpp"

namespace lmetk {

struct PriceEmissionPair {
  Eigen::VectorXd alpha;  // LMP, currency/MW
  Eigen::VectorXd beta;   // LME, kgCO2/MW
  int region_id = -1;
};

// alpha = c^T G, beta = e^T G for the region's sensitivity matrix.
PriceEmissionPair region_prices(const CriticalRegion& region,
                                const Eigen::VectorXd& cost,
                                const Eigen::VectorXd& emission);

// Region containing the load; ties on shared facets resolve to the lowest
// region id. Throws LocateError with nearest-region diagnostics on a miss.
int locate(const RegionDatabase& db, const Eigen::VectorXd& load,
           double tol = 1e-9);

PriceEmissionPair lme_for_load(const RegionDatabase& db,
                               const Eigen::VectorXd& load);

struct LmpIndexEntry {
  Eigen::VectorXd alpha;         // representative LMP key
  Eigen::VectorXd beta;          // shared LME of the member regions
  std::vector<int> region_ids;
  bool collision = false;        // members disagree on beta
  std::vector<Eigen::VectorXd> collision_betas;
};

// Pre-recorded LMP -> LME map over the region database. audit_pass certifies
// that every entry's regions share a single LME (within 1e-9).
struct LmpIndex {
  std::vector<LmpIndexEntry> entries;
  double match_tolerance = 1e-6;
  bool audit_pass = true;
};

// Cluster regions by LMP vector within tol (L-inf), deterministically:
// regions are scanned in order of their 1e-9-quantized alpha keys and join
// the first entry within tolerance. Collisions are recorded, not hidden.
LmpIndex build_lmp_index(const RegionDatabase& db, double tol = 1e-6);

// Nearest entry within match_tolerance (L-inf). Throws UnknownLmpError when
// nothing matches and AmbiguousLmpError when the matched entry is a recorded
// collision.
const LmpIndexEntry& lmp_match(const LmpIndex& index,
                               const Eigen::VectorXd& alpha);
Eigen::VectorXd lme_for_lmp(const LmpIndex& index,
                            const Eigen::VectorXd& alpha);

}  // namespace lmetk
