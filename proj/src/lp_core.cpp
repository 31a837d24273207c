#include "lmetk/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lmetk/errors.hpp"
#include "lmetk/simplex.hpp"

namespace lmetk {

DispatchSolution solve_sced(const CompactForm& compact,
                            const Eigen::VectorXd& cost,
                            const Eigen::VectorXd& emission,
                            const Eigen::VectorXd& load,
                            const ScedTolerances& tol) {
  const int g = compact.n_gens();
  const int p = compact.n_rows();
  const int n = compact.n_buses();
  if (load.size() != n) throw ValidationError("load: wrong dimension");
  for (int j = 0; j < n; ++j)
    if (load(j) < 0.0) throw ValidationError("load: must be >= 0 elementwise");

  const Eigen::VectorXd rhs = compact.b + compact.F * load;

  // Row scaling by the max-abs structural coefficient; duals are unscaled
  // back afterwards. Rows whose coefficients are numerical zeros (a line the
  // generators cannot load) stay unscaled rather than being blown up.
  const double a_scale = std::max(1.0, compact.A.cwiseAbs().maxCoeff());
  Eigen::VectorXd row_scale(p);
  for (int i = 0; i < p; ++i) {
    const double s = compact.A.row(i).cwiseAbs().maxCoeff();
    row_scale(i) = s > 1e-10 * a_scale ? s : 1.0;
  }

  LpProblem lp;
  lp.cost = cost;
  lp.ineq_A = row_scale.cwiseInverse().asDiagonal() * compact.A;
  lp.ineq_b = rhs.cwiseQuotient(row_scale);
  lp.eq_A = Eigen::MatrixXd::Ones(1, g);
  lp.eq_b = Eigen::VectorXd::Constant(1, load.sum());
  lp.lower = Eigen::VectorXd::Constant(g, -kInf);
  lp.upper = Eigen::VectorXd::Constant(g, kInf);

  SimplexSolver::Options sopt;
  sopt.feas_tol = tol.feas_tol;
  SimplexSolver solver(sopt);
  const LpSolution sol = solver.solve(lp);

  if (sol.status == LpStatus::Infeasible) {
    std::vector<int> rows;
    std::vector<double> values;
    for (int i = 0; i < p; ++i) {
      const double y = sol.farkas_ineq(i) / row_scale(i);
      if (y > 1e-9) {
        rows.push_back(i);
        values.push_back(y);
      }
    }
    std::ostringstream msg;
    msg << "dispatch infeasible; Farkas certificate rows:";
    for (size_t k = 0; k < rows.size(); ++k)
      msg << " " << compact.row_label(rows[k]);
    throw InfeasibleError(msg.str(), std::move(rows), std::move(values),
                          sol.farkas_eq.size() ? sol.farkas_eq(0) : 0.0);
  }
  if (sol.status == LpStatus::Unbounded)
    throw Error("internal: dispatch LP unbounded (costs must be >= 0)");
  if (sol.status == LpStatus::IterationLimit)
    throw Error("internal: simplex iteration limit reached");

  DispatchSolution out;
  out.x = sol.v;
  out.cost = cost.dot(out.x);
  out.emissions = emission.dot(out.x);
  out.lambda = sol.ineq_dual.cwiseQuotient(row_scale);
  out.mu = -sol.eq_dual(0);
  out.slack = rhs - compact.A * out.x;
  out.dual_objective = sol.dual_objective;
  out.iterations = sol.iterations;

  // Active set on scaled slacks; weakly active rows flag degeneracy.
  int weak = 0;
  for (int i = 0; i < p; ++i) {
    if (std::abs(out.slack(i)) / row_scale(i) < tol.slack_tol) {
      out.active_set.push_back(i);
      if (out.lambda(i) * row_scale(i) <= tol.dual_tol) ++weak;
    }
  }
  out.degenerate =
      static_cast<int>(out.active_set.size()) != g - 1 || weak > 0;
  return out;
}

DispatchSolution solve_sced(const NetworkCase& net, const Eigen::VectorXd& load,
                            const ScedTolerances& tol) {
  const CompactForm compact = build_compact(net);
  return solve_sced(compact, net.cost_vector(), net.emission_vector(), load, tol);
}

NodalPrices nodal_prices_from_duals(const NetworkCase& net,
                                    const DispatchSolution& sol) {
  const int g = net.n_gens(), m = net.n_lines(), n = net.n_buses;
  NodalPrices out;
  out.unique = !sol.degenerate;
  out.price = Eigen::VectorXd::Constant(n, sol.mu);
  for (int k = 0; k < m; ++k) {
    const double net_dual = sol.lambda(2 * g + k) - sol.lambda(2 * g + m + k);
    if (net_dual != 0.0) out.price -= net_dual * net.ptdf.row(k).transpose();
  }
  return out;
}

}  // namespace lmetk
