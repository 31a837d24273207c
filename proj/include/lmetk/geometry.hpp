#pragma once

#include <vector>

#include "lmetk/network.hpp"

namespace lmetk {

struct ChebyshevResult {
  bool feasible = false;
  double radius = 0.0;
  Eigen::VectorXd center;  // full-dimension point (frozen dims filled in)
};

// Largest inscribed ball of the halfspace intersection, restricted to the
// affine hull given by free_dims; frozen coordinates are read from
// frozen_point. With no free dimensions the result is frozen_point itself
// (radius +inf) when feasible.
ChebyshevResult chebyshev_center(const std::vector<Halfspace>& halfspaces,
                                 const std::vector<int>& free_dims,
                                 const Eigen::VectorXd& frozen_point);

// All dimensions free.
ChebyshevResult chebyshev_center(const std::vector<Halfspace>& halfspaces,
                                 int dim);

// Minimal subset describing the same polyhedron: a halfspace is dropped when
// maximizing its normal over the remaining ones stays within tol of its
// offset. Rows are tested in order, so among duplicates the later one wins.
// Throws DegenerateError when the set has empty interior in the free dims.
std::vector<int> irredundant_rows(const std::vector<Halfspace>& halfspaces,
                                  const std::vector<int>& free_dims,
                                  const Eigen::VectorXd& frozen_point,
                                  double tol = 1e-9);

std::vector<Halfspace> remove_redundant(const std::vector<Halfspace>& halfspaces,
                                        int dim, double tol = 1e-9);

}  // namespace lmetk
