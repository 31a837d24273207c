#pragma once

#include <string>
#include <vector>

#include "lmetk/network.hpp"

namespace lmetk {

enum class RowKind { GenUpper, GenLower, LineUpper, LineLower };

// Inequality system A x <= b + F l of the dispatch problem, with the power
// balance kept as an explicit equality sum(x) = sum(l). Row order is fixed:
// gen-upper block, gen-lower block, line-upper block, line-lower block, so
// active-set signatures are comparable across runs.
struct CompactForm {
  Eigen::MatrixXd A;  // p x g
  Eigen::VectorXd b;  // p
  Eigen::MatrixXd F;  // p x n
  std::vector<RowKind> row_kind;
  std::vector<int> row_item;  // generator or line index behind each row

  int n_rows() const { return static_cast<int>(b.size()); }
  int n_gens() const { return static_cast<int>(A.cols()); }
  int n_buses() const { return static_cast<int>(F.cols()); }
  std::string row_label(int row) const;

  // Balance row sum(x) = sum(l), kept out of the inequality block.
  Eigen::VectorXd balance_gen_coeff() const {
    return Eigen::VectorXd::Ones(n_gens());
  }
  Eigen::VectorXd balance_load_coeff() const {
    return Eigen::VectorXd::Ones(n_buses());
  }
};

// Parse and validate a JSON case document. Computes the PTDF from reactances
// when the file does not supply one; if both are present they must agree
// within 1e-6. Throws ValidationError with the offending field path.
NetworkCase parse_case(const std::string& text);
NetworkCase parse_case_file(const std::string& path);

// Standard DC PTDF: row k is the flow on line k per unit injection at each
// bus, withdrawn at the reference bus. Requires positive reactances and a
// connected network.
Eigen::MatrixXd compute_ptdf(const std::vector<Line>& lines, int n_buses,
                             int reference_bus);

CompactForm build_compact(const NetworkCase& net);

LoadPolytope case_polytope(const NetworkCase& net);

}  // namespace lmetk
