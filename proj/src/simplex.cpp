#include "lmetk/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lmetk/errors.hpp"

namespace lmetk {

namespace {
enum VStat { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeZero = 3 };
}

LpProblem LpProblem::inequality_form(Eigen::VectorXd c, Eigen::MatrixXd A,
                                     Eigen::VectorXd b) {
  LpProblem p;
  const int nv = static_cast<int>(c.size());
  p.cost = std::move(c);
  p.ineq_A = std::move(A);
  p.ineq_b = std::move(b);
  p.eq_A = Eigen::MatrixXd::Zero(0, nv);
  p.eq_b = Eigen::VectorXd::Zero(0);
  p.lower = Eigen::VectorXd::Constant(nv, -kInf);
  p.upper = Eigen::VectorXd::Constant(nv, kInf);
  return p;
}

double SimplexSolver::nonbasic_value(int j) const {
  switch (vstat_[j]) {
    case kAtLower: return lo_(j);
    case kAtUpper: return up_(j);
    default: return 0.0;  // free at zero
  }
}

Eigen::VectorXd SimplexSolver::reduced_costs() const {
  Eigen::VectorXd cb(n_rows_);
  for (int i = 0; i < n_rows_; ++i) cb(i) = obj_(basis_[i]);
  Eigen::VectorXd d = obj_;
  if (n_rows_ > 0) d.noalias() -= tab_.transpose() * cb;
  return d;
}

// Minimum-ratio test along tab column `col` moved in direction `dir`.
// Returns the leaving row (-1 when the entering variable's own opposite
// bound is the binding limit), with `step` the admissible movement.
int SimplexSolver::ratio_test(int col, int dir, double& step, bool& bound_flip) {
  const auto w = tab_.col(col);
  const double range = up_(col) - lo_(col);
  const bool flip_possible = std::isfinite(range);

  auto row_ratio = [&](int i, bool& to_lower) -> double {
    const double coef = dir * w(i);
    const int bv = basis_[i];
    if (coef > opt_.pivot_tol && std::isfinite(lo_(bv))) {
      to_lower = true;
      return std::max(0.0, (xb_(i) - lo_(bv)) / coef);
    }
    if (coef < -opt_.pivot_tol && std::isfinite(up_(bv))) {
      to_lower = false;
      return std::max(0.0, (up_(bv) - xb_(i)) / (-coef));
    }
    return kInf;
  };

  double best_row = kInf;
  for (int i = 0; i < n_rows_; ++i) {
    bool tl;
    best_row = std::min(best_row, row_ratio(i, tl));
  }

  if (!std::isfinite(best_row)) {
    if (flip_possible) {
      step = range;
      bound_flip = true;
      return -1;
    }
    step = kInf;
    bound_flip = false;
    return -1;  // unbounded direction
  }

  const double tie = 1e-12 + 1e-12 * best_row;
  if (flip_possible && range < best_row - tie) {
    step = range;
    bound_flip = true;
    return -1;
  }

  // Leaving row: minimum ratio, ties broken lexicographically on the
  // pivot-scaled tableau row, then by smallest basic variable index.
  int pick = -1;
  bool pick_lower = true;
  for (int i = 0; i < n_rows_; ++i) {
    bool tl;
    const double t = row_ratio(i, tl);
    if (!(t <= best_row + tie)) continue;
    if (pick < 0) {
      pick = i;
      pick_lower = tl;
      continue;
    }
    const double wi = dir * w(i), wp = dir * w(pick);
    int cmp = 0;
    for (int j = 0; j < n_cols_; ++j) {
      const double a = tab_(i, j) / wi, b = tab_(pick, j) / wp;
      if (a < b - 1e-14) { cmp = -1; break; }
      if (a > b + 1e-14) { cmp = 1; break; }
    }
    if (cmp < 0 || (cmp == 0 && basis_[i] < basis_[pick])) {
      pick = i;
      pick_lower = tl;
    }
  }
  bool tl_pick;
  step = row_ratio(pick, tl_pick);
  if (flip_possible) step = std::min(step, range);
  bound_flip = false;
  return pick;
}

void SimplexSolver::pivot(int row, int col) {
  const double piv = tab_(row, col);
  tab_.row(row) /= piv;
  for (int i = 0; i < n_rows_; ++i) {
    if (i == row) continue;
    const double f = tab_(i, col);
    if (f != 0.0) tab_.row(i) -= f * tab_.row(row);
  }
}

bool SimplexSolver::run_phase(int phase, int& iterations, LpStatus& status) {
  while (iterations < opt_.max_iterations) {
    const Eigen::VectorXd d = reduced_costs();

    // Bland: smallest-index eligible entering variable.
    int enter = -1, dir = 0;
    for (int j = 0; j < n_cols_; ++j) {
      if (vstat_[j] == kBasic) continue;
      if (lo_(j) == up_(j)) continue;  // fixed (retired artificials)
      if (vstat_[j] == kAtLower && d(j) < -opt_.opt_tol) { enter = j; dir = 1; break; }
      if (vstat_[j] == kAtUpper && d(j) > opt_.opt_tol) { enter = j; dir = -1; break; }
      if (vstat_[j] == kFreeZero && std::abs(d(j)) > opt_.opt_tol) {
        enter = j;
        dir = d(j) > 0.0 ? -1 : 1;
        break;
      }
    }
    if (enter < 0) {
      status = LpStatus::Optimal;
      return true;
    }

    double step = 0.0;
    bool flip = false;
    const int leave_row = ratio_test(enter, dir, step, flip);
    ++iterations;

    if (leave_row < 0 && !flip) {
      if (phase == 1) throw Error("internal: phase-1 LP unbounded");
      status = LpStatus::Unbounded;
      return true;
    }
    if (step != 0.0) xb_.noalias() -= (dir * step) * tab_.col(enter);
    if (flip) {
      vstat_[enter] = vstat_[enter] == kAtLower ? kAtUpper : kAtLower;
      continue;
    }
    const int leaving = basis_[leave_row];
    const double coef = dir * tab_(leave_row, enter);
    vstat_[leaving] = coef > 0.0 ? kAtLower : kAtUpper;
    const double enter_val = nonbasic_value(enter) + dir * step;
    pivot(leave_row, enter);
    basis_[leave_row] = enter;
    vstat_[enter] = kBasic;
    xb_(leave_row) = enter_val;
  }
  status = LpStatus::IterationLimit;
  return false;
}

LpSolution SimplexSolver::solve(const LpProblem& p) {
  const int nv = p.n_vars();
  const int ni = static_cast<int>(p.ineq_b.size());
  const int ne = static_cast<int>(p.eq_b.size());
  if (p.lower.size() != nv || p.upper.size() != nv)
    throw ValidationError("lp: bound vectors must match the variable count");
  for (int j = 0; j < nv; ++j)
    if (p.lower(j) > p.upper(j))
      throw ValidationError("lp: lower bound exceeds upper bound");

  n_rows_ = ni + ne;
  n_struct_ = nv;
  n_slack_ = ni;

  Eigen::VectorXd rhs(n_rows_);
  rhs.head(ni) = p.ineq_b;
  rhs.tail(ne) = p.eq_b;

  // Start structural variables at their nearest finite bound (0 when free).
  std::vector<int> stat0(nv);
  Eigen::VectorXd v0(nv);
  for (int j = 0; j < nv; ++j) {
    if (std::isfinite(p.lower(j))) { stat0[j] = kAtLower; v0(j) = p.lower(j); }
    else if (std::isfinite(p.upper(j))) { stat0[j] = kAtUpper; v0(j) = p.upper(j); }
    else { stat0[j] = kFreeZero; v0(j) = 0.0; }
  }
  Eigen::VectorXd resid = rhs;
  if (nv > 0) {
    resid.head(ni).noalias() -= p.ineq_A * v0;
    resid.tail(ne).noalias() -= p.eq_A * v0;
  }

  // Artificials: equality rows always, inequality rows with negative residual.
  std::vector<int> art_row;
  std::vector<double> art_sign;
  for (int i = 0; i < ni; ++i)
    if (resid(i) < 0.0) { art_row.push_back(i); art_sign.push_back(-1.0); }
  for (int i = 0; i < ne; ++i) {
    art_row.push_back(ni + i);
    art_sign.push_back(resid(ni + i) >= 0.0 ? 1.0 : -1.0);
  }
  const int n_art = static_cast<int>(art_row.size());
  n_cols_ = nv + ni + n_art;

  Eigen::MatrixXd acols = Eigen::MatrixXd::Zero(n_rows_, n_cols_);
  if (nv > 0) {
    acols.topLeftCorner(ni, nv) = p.ineq_A;
    acols.bottomLeftCorner(ne, nv) = p.eq_A;
  }
  for (int i = 0; i < ni; ++i) acols(i, nv + i) = 1.0;
  for (int a = 0; a < n_art; ++a) acols(art_row[a], nv + ni + a) = art_sign[a];

  lo_ = Eigen::VectorXd::Constant(n_cols_, 0.0);
  up_ = Eigen::VectorXd::Constant(n_cols_, kInf);
  lo_.head(nv) = p.lower;
  up_.head(nv) = p.upper;

  vstat_.assign(n_cols_, kAtLower);
  for (int j = 0; j < nv; ++j) vstat_[j] = stat0[j];

  basis_.assign(n_rows_, -1);
  xb_ = Eigen::VectorXd::Zero(n_rows_);
  std::vector<bool> has_art(n_rows_, false);
  for (int a = 0; a < n_art; ++a) has_art[art_row[a]] = true;
  for (int i = 0; i < ni; ++i) {
    if (!has_art[i]) {
      basis_[i] = nv + i;  // feasible slack
      vstat_[nv + i] = kBasic;
      xb_(i) = resid(i);
    }
  }
  for (int a = 0; a < n_art; ++a) {
    const int i = art_row[a];
    basis_[i] = nv + ni + a;
    vstat_[nv + ni + a] = kBasic;
    xb_(i) = resid(i) * art_sign[a];
  }

  // tab = B^{-1} acols; the initial basis is diagonal with entries +-1.
  tab_ = acols;
  for (int a = 0; a < n_art; ++a)
    if (art_sign[a] < 0.0) tab_.row(art_row[a]) = -acols.row(art_row[a]);

  LpSolution out;
  out.v = Eigen::VectorXd::Zero(nv);
  out.ineq_dual = Eigen::VectorXd::Zero(ni);
  out.eq_dual = Eigen::VectorXd::Zero(ne);
  out.reduced_cost = Eigen::VectorXd::Zero(nv);
  int iterations = 0;

  auto refactor = [&](const Eigen::VectorXd& phase_obj, Eigen::VectorXd& y,
                      Eigen::VectorXd& d) {
    if (n_rows_ == 0) {
      y.resize(0);
      d = phase_obj;
      return;
    }
    Eigen::MatrixXd bmat(n_rows_, n_rows_);
    Eigen::VectorXd cb(n_rows_);
    for (int i = 0; i < n_rows_; ++i) {
      bmat.col(i) = acols.col(basis_[i]);
      cb(i) = phase_obj(basis_[i]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    Eigen::VectorXd nb_contrib = Eigen::VectorXd::Zero(n_rows_);
    for (int j = 0; j < n_cols_; ++j) {
      if (vstat_[j] == kBasic) continue;
      const double vj = nonbasic_value(j);
      if (vj != 0.0) nb_contrib.noalias() += vj * acols.col(j);
    }
    xb_ = lu.solve(rhs - nb_contrib);
    y = lu.transpose().solve(cb);
    d = phase_obj;
    d.noalias() -= acols.transpose() * y;
  };

  // Phase 1: drive the artificials to zero.
  LpStatus status = LpStatus::Optimal;
  bool finished = true;
  if (n_art > 0) {
    obj_ = Eigen::VectorXd::Zero(n_cols_);
    obj_.tail(n_art).setOnes();
    finished = run_phase(1, iterations, status);
    out.iterations = iterations;
    if (!finished) {
      out.status = LpStatus::IterationLimit;
      return out;
    }
    Eigen::VectorXd y1, d1;
    refactor(obj_, y1, d1);
    double art_sum = 0.0;
    for (int i = 0; i < n_rows_; ++i)
      if (basis_[i] >= nv + ni) art_sum += std::abs(xb_(i));
    const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
    if (art_sum > opt_.feas_tol * scale * 10.0) {
      out.status = LpStatus::Infeasible;
      out.farkas_ineq = -y1.head(ni);
      out.farkas_eq = -y1.tail(ne);
      for (int i = 0; i < ni; ++i)  // numerical dust
        if (out.farkas_ineq(i) < 0.0 && out.farkas_ineq(i) > -1e-9)
          out.farkas_ineq(i) = 0.0;
      out.iterations = iterations;
      return out;
    }
    // Retire the artificials: fixed at zero, never eligible again.
    for (int a = 0; a < n_art; ++a) up_(nv + ni + a) = 0.0;
  }

  // Phase 2.
  obj_ = Eigen::VectorXd::Zero(n_cols_);
  obj_.head(nv) = p.cost;
  finished = run_phase(2, iterations, status);
  out.iterations = iterations;
  if (!finished) {
    out.status = LpStatus::IterationLimit;
    return out;
  }
  if (status == LpStatus::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  Eigen::VectorXd y, d;
  refactor(obj_, y, d);

  for (int j = 0; j < nv; ++j)
    out.v(j) = vstat_[j] == kBasic ? 0.0 : nonbasic_value(j);
  for (int i = 0; i < n_rows_; ++i)
    if (basis_[i] < nv) out.v(basis_[i]) = xb_(i);

  out.status = LpStatus::Optimal;
  out.objective = p.cost.dot(out.v);
  out.ineq_dual = -y.head(ni);
  out.eq_dual = -y.tail(ne);
  for (int i = 0; i < ni; ++i)
    if (out.ineq_dual(i) < 0.0 && out.ineq_dual(i) > -1e-8) out.ineq_dual(i) = 0.0;
  out.reduced_cost = d.head(nv);

  out.dual_objective = n_rows_ > 0 ? y.dot(rhs) : 0.0;
  for (int j = 0; j < nv + ni; ++j) {
    if (vstat_[j] == kBasic || vstat_[j] == kFreeZero) continue;
    const double bound = nonbasic_value(j);
    if (bound != 0.0 && std::isfinite(bound)) out.dual_objective += d(j) * bound;
  }

  for (int i = 0; i < n_rows_; ++i) {
    const int bv = basis_[i];
    if (bv >= nv + ni) continue;  // artificial
    if ((std::isfinite(lo_(bv)) && xb_(i) - lo_(bv) < opt_.degen_tol) ||
        (std::isfinite(up_(bv)) && up_(bv) - xb_(i) < opt_.degen_tol))
      out.basic_at_bound = true;
  }
  for (int j = 0; j < nv + ni; ++j)
    if (vstat_[j] != kBasic && lo_(j) != up_(j) && std::abs(d(j)) <= opt_.opt_tol)
      out.zero_reduced_cost = true;

  return out;
}

}  // namespace lmetk
