#pragma once

#include <vector>

#include "lmetk/grid_model.hpp"
#include "lmetk/network.hpp"

namespace lmetk {

// Optimal dispatch for one load vector. lambda holds the multipliers of the
// compact-form inequality rows (>= 0); mu is the balance-equality multiplier
// with the sign convention of the marginal cost of one extra MW of load at
// the reference bus.
struct DispatchSolution {
  Eigen::VectorXd x;        // g, MW
  double cost = 0.0;        // currency
  double emissions = 0.0;   // kgCO2
  Eigen::VectorXd lambda;   // p
  double mu = 0.0;
  std::vector<int> active_set;  // tight rows, ascending
  bool degenerate = false;
  Eigen::VectorXd slack;    // b + F l - A x
  double dual_objective = 0.0;
  int iterations = 0;
};

struct ScedTolerances {
  double feas_tol = 1e-9;     // absolute, on row-scaled data
  double slack_tol = 1e-7;    // active-set threshold
  double dual_tol = 1e-9;     // dual positivity threshold
};

// Solve the dispatch LP for a fixed load. Deterministic (fixed pivot rules).
// Throws InfeasibleError with the Farkas row set when no dispatch exists;
// a degenerate optimum is flagged, never silently resolved.
DispatchSolution solve_sced(const NetworkCase& net, const Eigen::VectorXd& load,
                            const ScedTolerances& tol = {});
DispatchSolution solve_sced(const CompactForm& compact,
                            const Eigen::VectorXd& cost,
                            const Eigen::VectorXd& emission,
                            const Eigen::VectorXd& load,
                            const ScedTolerances& tol = {});

struct NodalPrices {
  Eigen::VectorXd price;  // n, currency/MW
  bool unique = true;     // false when the solution is degenerate
};

// Dual-based bus prices: energy price mu plus the PTDF-weighted congestion
// duals. Serves as an independent cross-check of the region-based prices.
NodalPrices nodal_prices_from_duals(const NetworkCase& net,
                                    const DispatchSolution& sol);

}  // namespace lmetk
