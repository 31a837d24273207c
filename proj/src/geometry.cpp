#include "lmetk/geometry.hpp"

#include <cmath>
#include <numeric>

#include "lmetk/errors.hpp"
#include "lmetk/simplex.hpp"

namespace lmetk {

namespace {

struct ProjectedRow {
  Eigen::VectorXd a;  // coefficients over the free dims
  double rhs = 0.0;
  bool constant = false;
};

// Restrict a halfspace to the affine hull: frozen coordinates move into the
// offset. Rows whose free part vanishes become constant truths (or proofs of
// emptiness).
ProjectedRow project_row(const Halfspace& h, const std::vector<int>& free_dims,
                         const Eigen::VectorXd& frozen_point) {
  ProjectedRow r;
  const int df = static_cast<int>(free_dims.size());
  r.a.resize(df);
  double shift = 0.0;
  Eigen::VectorXd mask = h.normal;
  for (int k = 0; k < df; ++k) {
    r.a(k) = h.normal(free_dims[k]);
    mask(free_dims[k]) = 0.0;
  }
  shift = mask.dot(frozen_point);
  r.rhs = h.offset - shift;
  r.constant = df == 0 || r.a.cwiseAbs().maxCoeff() <= 1e-12;
  return r;
}

}  // namespace

ChebyshevResult chebyshev_center(const std::vector<Halfspace>& halfspaces,
                                 const std::vector<int>& free_dims,
                                 const Eigen::VectorXd& frozen_point) {
  ChebyshevResult out;
  const int df = static_cast<int>(free_dims.size());

  std::vector<ProjectedRow> rows;
  rows.reserve(halfspaces.size());
  for (const auto& h : halfspaces) {
    ProjectedRow r = project_row(h, free_dims, frozen_point);
    if (r.constant) {
      if (r.rhs < -1e-9) return out;  // infeasible constant constraint
      continue;
    }
    rows.push_back(std::move(r));
  }

  if (df == 0) {
    out.feasible = true;
    out.radius = kInf;
    out.center = frozen_point;
    return out;
  }

  // max r  s.t.  a.l + |a| r <= rhs, 0 <= r
  const int ni = static_cast<int>(rows.size());
  LpProblem lp;
  lp.cost = Eigen::VectorXd::Zero(df + 1);
  lp.cost(df) = -1.0;
  lp.ineq_A = Eigen::MatrixXd::Zero(ni, df + 1);
  lp.ineq_b = Eigen::VectorXd::Zero(ni);
  for (int i = 0; i < ni; ++i) {
    lp.ineq_A.row(i).head(df) = rows[i].a;
    lp.ineq_A(i, df) = rows[i].a.norm();
    lp.ineq_b(i) = rows[i].rhs;
  }
  lp.eq_A = Eigen::MatrixXd::Zero(0, df + 1);
  lp.eq_b = Eigen::VectorXd::Zero(0);
  lp.lower = Eigen::VectorXd::Constant(df + 1, -kInf);
  lp.upper = Eigen::VectorXd::Constant(df + 1, kInf);
  lp.lower(df) = 0.0;

  SimplexSolver solver;
  const LpSolution sol = solver.solve(lp);
  if (sol.status == LpStatus::Infeasible) return out;
  if (sol.status == LpStatus::Unbounded) {
    out.feasible = true;
    out.radius = kInf;
    out.center = frozen_point;  // no finite center to report
    return out;
  }
  if (sol.status != LpStatus::Optimal)
    throw Error("internal: Chebyshev LP did not terminate");

  out.feasible = true;
  out.radius = sol.v(df);
  out.center = frozen_point;
  for (int k = 0; k < df; ++k) out.center(free_dims[k]) = sol.v(k);
  return out;
}

ChebyshevResult chebyshev_center(const std::vector<Halfspace>& halfspaces,
                                 int dim) {
  std::vector<int> all(dim);
  std::iota(all.begin(), all.end(), 0);
  return chebyshev_center(halfspaces, all, Eigen::VectorXd::Zero(dim));
}

std::vector<int> irredundant_rows(const std::vector<Halfspace>& halfspaces,
                                  const std::vector<int>& free_dims,
                                  const Eigen::VectorXd& frozen_point,
                                  double tol) {
  const int nh = static_cast<int>(halfspaces.size());
  const int df = static_cast<int>(free_dims.size());

  std::vector<ProjectedRow> rows(nh);
  std::vector<bool> alive(nh, true);
  for (int i = 0; i < nh; ++i) {
    rows[i] = project_row(halfspaces[i], free_dims, frozen_point);
    if (rows[i].constant) {
      if (rows[i].rhs < -tol)
        throw DegenerateError("redundancy removal: empty set");
      alive[i] = false;  // constant truth carries no boundary
    }
  }

  if (df == 0) return {};

  const ChebyshevResult cheb =
      chebyshev_center(halfspaces, free_dims, frozen_point);
  if (!cheb.feasible || (std::isfinite(cheb.radius) && cheb.radius <= 1e-12))
    throw DegenerateError("redundancy removal: empty interior");

  SimplexSolver solver;
  for (int r = 0; r < nh; ++r) {
    if (!alive[r]) continue;
    // max a_r.l over the others, capped at rhs_r + 1 to stay bounded.
    std::vector<int> others;
    for (int i = 0; i < nh; ++i)
      if (alive[i] && i != r) others.push_back(i);

    const int ni = static_cast<int>(others.size()) + 1;
    LpProblem lp;
    lp.cost = -rows[r].a;
    lp.ineq_A = Eigen::MatrixXd::Zero(ni, df);
    lp.ineq_b = Eigen::VectorXd::Zero(ni);
    for (int k = 0; k + 1 < ni; ++k) {
      lp.ineq_A.row(k) = rows[others[k]].a;
      lp.ineq_b(k) = rows[others[k]].rhs;
    }
    lp.ineq_A.row(ni - 1) = rows[r].a;
    lp.ineq_b(ni - 1) = rows[r].rhs + 1.0;
    lp.eq_A = Eigen::MatrixXd::Zero(0, df);
    lp.eq_b = Eigen::VectorXd::Zero(0);
    lp.lower = Eigen::VectorXd::Constant(df, -kInf);
    lp.upper = Eigen::VectorXd::Constant(df, kInf);

    const LpSolution sol = solver.solve(lp);
    if (sol.status != LpStatus::Optimal)
      throw Error("internal: redundancy LP did not terminate");
    if (-sol.objective <= rows[r].rhs + tol) alive[r] = false;
  }

  std::vector<int> keep;
  for (int i = 0; i < nh; ++i)
    if (alive[i]) keep.push_back(i);
  return keep;
}

std::vector<Halfspace> remove_redundant(const std::vector<Halfspace>& halfspaces,
                                        int dim, double tol) {
  std::vector<int> all(dim);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> keep =
      irredundant_rows(halfspaces, all, Eigen::VectorXd::Zero(dim), tol);
  std::vector<Halfspace> out;
  out.reserve(keep.size());
  for (int i : keep) out.push_back(halfspaces[i]);
  return out;
}

}  // namespace lmetk
