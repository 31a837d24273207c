#pragma once

#include "lmetk/grid_model.hpp"
#include "lmetk/lp_core.hpp"

namespace lmetk {

// First-order response of the optimum to the load parameters. G(i,j) is
// dx_i/dl_j; every column sums to 1 (a marginal MW of load is met by
// generation). dLambda is dlambda/dl, identically zero away from degeneracy
// since the load enters the LP right-hand side only.
struct SensitivityMatrix {
  Eigen::MatrixXd G;        // g x n
  Eigen::MatrixXd dLambda;  // p x n
};

// Computed two ways and cross-checked within 1e-9: the full KKT-differential
// system in (x, lambda, mu), and the reduced active-constraint system
// { A_act dx = F_act dl, sum(dx) = sum(dl) }. The reduced-route G, a pure
// function of the active signature, is the one returned. Throws
// DegenerateError (carrying the signature) when the KKT matrix is singular
// or the active set is not a nondegenerate vertex.
SensitivityMatrix sensitivity_at(const CompactForm& compact,
                                 const DispatchSolution& sol,
                                 const Eigen::VectorXd& load);

}  // namespace lmetk
