#pragma once

#include <Eigen/Dense>
#include <limits>

namespace lmetk {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min cost.v  s.t.  ineq_A v <= ineq_b,  eq_A v = eq_b,  lower <= v <= upper
struct LpProblem {
  Eigen::VectorXd cost;
  Eigen::MatrixXd ineq_A;
  Eigen::VectorXd ineq_b;
  Eigen::MatrixXd eq_A;   // may have zero rows
  Eigen::VectorXd eq_b;
  Eigen::VectorXd lower;  // -inf allowed
  Eigen::VectorXd upper;  // +inf allowed

  int n_vars() const { return static_cast<int>(cost.size()); }
  static LpProblem inequality_form(Eigen::VectorXd c, Eigen::MatrixXd A,
                                   Eigen::VectorXd b);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

// Dual convention: L = cost.v + ineq_dual.(Av - b) + eq_dual.(Ev - d) with
// ineq_dual >= 0. On infeasibility, farkas_* certify
//   farkas_ineq >= 0,  farkas_ineq^T A + farkas_eq^T E == w,
//   farkas_ineq^T b + farkas_eq^T d - min_{box} w.v < 0.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd v;
  double objective = 0.0;
  Eigen::VectorXd ineq_dual;
  Eigen::VectorXd eq_dual;
  Eigen::VectorXd reduced_cost;  // structural variables
  Eigen::VectorXd farkas_ineq;
  Eigen::VectorXd farkas_eq;
  int iterations = 0;
  bool basic_at_bound = false;    // primal degeneracy at the basis level
  bool zero_reduced_cost = false; // dual degeneracy at the basis level
  double dual_objective = 0.0;
};

// Dense bounded-variable primal simplex. Two phases; entering variable by
// Bland's smallest-index rule, leaving variable by minimum ratio with a
// lexicographic tie-break. Deterministic: identical inputs give bit-identical
// results. One instance per thread; instances hold mutable tableau state.
class SimplexSolver {
 public:
  struct Options {
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-10;
    double degen_tol = 1e-7;
    int max_iterations = 200000;
  };

  SimplexSolver() = default;
  explicit SimplexSolver(Options opt) : opt_(opt) {}

  LpSolution solve(const LpProblem& p);

 private:
  Options opt_;

  // Tableau state (valid during a solve).
  Eigen::MatrixXd tab_;      // rows x cols, B^{-1} * all columns
  Eigen::VectorXd xb_;       // basic variable values
  std::vector<int> basis_;   // variable index per row
  std::vector<int> vstat_;   // per-variable: 0 basic, 1 at lower, 2 at upper, 3 free-at-zero
  Eigen::VectorXd lo_, up_;  // bounds for all tableau variables
  Eigen::VectorXd obj_;      // current objective for all tableau variables
  int n_rows_ = 0, n_cols_ = 0, n_struct_ = 0, n_slack_ = 0;

  double nonbasic_value(int j) const;
  Eigen::VectorXd reduced_costs() const;
  bool run_phase(int phase, int& iterations, LpStatus& status);
  void pivot(int row, int col);
  int ratio_test(int col, int dir, double& step, bool& bound_flip);
};

}  // namespace lmetk
