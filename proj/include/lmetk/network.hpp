#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lmetk {

struct Generator {
  int bus = 0;
  double cost = 0.0;           // currency/MW
  double emission_rate = 0.0;  // kgCO2/MW
  double capacity = 0.0;       // MW
  std::string fuel;            // optional technology tag
};

struct Line {
  int from = 0;
  int to = 0;
  double reactance = 0.0;  // per-unit, valid when has_reactance
  bool has_reactance = false;
  double flow_upper = 0.0;  // MW, > 0
  double flow_lower = 0.0;  // MW, <= 0 (defaults to -flow_upper)
};

// Static grid description. PTDF rows are oriented from->to with withdrawal
// at the reference bus; the reference-bus column is identically zero.
struct NetworkCase {
  int n_buses = 0;
  int reference_bus = 0;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  Eigen::MatrixXd ptdf;     // m x n
  Eigen::MatrixXd gen_map;  // n x g, 0/1 bus-to-generator incidence
  Eigen::VectorXd nominal_load;  // n, MW
  double omega = 0.0;            // operating variation fraction

  int n_gens() const { return static_cast<int>(generators.size()); }
  int n_lines() const { return static_cast<int>(lines.size()); }

  Eigen::VectorXd cost_vector() const {
    Eigen::VectorXd c(n_gens());
    for (int i = 0; i < n_gens(); ++i) c(i) = generators[i].cost;
    return c;
  }
  Eigen::VectorXd emission_vector() const {
    Eigen::VectorXd e(n_gens());
    for (int i = 0; i < n_gens(); ++i) e(i) = generators[i].emission_rate;
    return e;
  }
  Eigen::VectorXd capacity_vector() const {
    Eigen::VectorXd u(n_gens());
    for (int i = 0; i < n_gens(); ++i) u(i) = generators[i].capacity;
    return u;
  }
};

// Closed halfspace {l : normal . l <= offset}.
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

// Operating box (1-w) l0 <= l <= (1+w) l0 plus optional extra halfspaces.
// Dimensions where the box collapses to a point (w*l0_j == 0) are "frozen":
// geometry is done in the affine hull of the remaining free dimensions.
struct LoadPolytope {
  Eigen::VectorXd nominal;
  double omega = 0.0;
  std::vector<Halfspace> extra;

  Eigen::VectorXd lower() const { return (1.0 - omega) * nominal; }
  Eigen::VectorXd upper() const { return (1.0 + omega) * nominal; }

  std::vector<int> free_dims() const {
    std::vector<int> dims;
    const Eigen::VectorXd lo = lower(), up = upper();
    for (int j = 0; j < nominal.size(); ++j)
      if (up(j) - lo(j) > 0.0) dims.push_back(j);
    return dims;
  }

  bool contains(const Eigen::VectorXd& l, double tol = 1e-9) const {
    const Eigen::VectorXd lo = lower(), up = upper();
    for (int j = 0; j < nominal.size(); ++j)
      if (l(j) < lo(j) - tol || l(j) > up(j) + tol) return false;
    for (const auto& h : extra)
      if (h.normal.dot(l) > h.offset + tol) return false;
    return true;
  }
};

}  // namespace lmetk
