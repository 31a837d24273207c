#include "lmetk/sensitivity.hpp"

#include <cmath>

#include "lmetk/errors.hpp"

namespace lmetk {

SensitivityMatrix sensitivity_at(const CompactForm& compact,
                                 const DispatchSolution& sol,
                                 const Eigen::VectorXd& load) {
  const int g = compact.n_gens();
  const int p = compact.n_rows();
  const int n = compact.n_buses();
  const std::vector<int>& sig = sol.active_set;

  if (sol.degenerate)
    throw DegenerateError("sensitivity: degenerate dispatch point", sig);
  if (static_cast<int>(sig.size()) != g - 1)
    throw DegenerateError("sensitivity: active set is not a simple vertex", sig);

  std::vector<bool> active(p, false);
  for (int i : sig) active[i] = true;

  // Reduced active-constraint route: { A_act dx = F_act dl, sum dx = sum dl }.
  Eigen::MatrixXd K(g, g);
  Eigen::MatrixXd rhsK(g, n);
  for (int r = 0; r < g - 1; ++r) {
    K.row(r) = compact.A.row(sig[r]);
    rhsK.row(r) = compact.F.row(sig[r]);
  }
  K.row(g - 1).setOnes();
  rhsK.row(g - 1).setOnes();

  Eigen::FullPivLU<Eigen::MatrixXd> luK(K);
  if (!luK.isInvertible())
    throw DegenerateError("sensitivity: active-constraint system singular", sig);
  const Eigen::MatrixXd G = luK.solve(rhsK);

  // Full KKT-differential route over (dx, dlambda, dmu). Multipliers on
  // inactive rows and slacks on active rows are clamped to their exact
  // values before assembly.
  const int dim = g + p + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(dim, n);

  M.block(0, g, g, p) = compact.A.transpose();
  M.block(0, g + p, g, 1) = -Eigen::VectorXd::Ones(g);
  for (int i = 0; i < p; ++i) {
    const double lam = active[i] ? sol.lambda(i) : 0.0;
    const double v = active[i] ? 0.0 : -sol.slack(i);  // V_i = A_i x - b_i - F_i l
    M.block(g + i, 0, 1, g) = lam * compact.A.row(i);
    M(g + i, g + i) = v;
    N.row(g + i) = lam * compact.F.row(i);
  }
  M.block(g + p, 0, 1, g).setOnes();
  N.row(g + p).setOnes();

  // Row equilibration keeps the mixed slack/price scales from poisoning the
  // condition number.
  for (int r = 0; r < dim; ++r) {
    const double s = M.row(r).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      M.row(r) /= s;
      N.row(r) /= s;
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> luM(M);
  const double rc = luM.rcond();
  if (!(rc > 1e-12))
    throw DegenerateError("sensitivity: KKT differential matrix singular", sig);
  const Eigen::MatrixXd full = luM.solve(N);

  const Eigen::MatrixXd G_kkt = full.topRows(g);
  if ((G_kkt - G).cwiseAbs().maxCoeff() > 1e-9)
    throw DegenerateError("sensitivity: KKT and active-system routes disagree",
                          sig);

  SensitivityMatrix out;
  out.G = G;
  out.dLambda = full.block(g, 0, p, n);
  return out;
}

}  // namespace lmetk
