#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lmetk {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Case-file or argument validation failure; message carries the field path.
struct ValidationError : Error {
  using Error::Error;
};

// LP infeasible; carries the Farkas certificate row set of the compact form.
struct InfeasibleError : Error {
  std::vector<int> certificate_rows;
  std::vector<double> certificate_values;
  double balance_multiplier = 0.0;
  InfeasibleError(const std::string& msg, std::vector<int> rows = {},
                  std::vector<double> values = {}, double bal = 0.0)
      : Error(msg),
        certificate_rows(std::move(rows)),
        certificate_values(std::move(values)),
        balance_multiplier(bal) {}
};

// Primal or dual degeneracy at a probe point; carries the tight-row signature.
struct DegenerateError : Error {
  std::vector<int> active_signature;
  DegenerateError(const std::string& msg, std::vector<int> sig = {})
      : Error(msg), active_signature(std::move(sig)) {}
};

// Load point not covered by any stored region.
struct LocateError : Error {
  int nearest_region = -1;
  double nearest_violation = 0.0;
  LocateError(const std::string& msg, int nearest, double violation)
      : Error(msg), nearest_region(nearest), nearest_violation(violation) {}
};

// No LMP index entry within the match tolerance.
struct UnknownLmpError : Error {
  using Error::Error;
};

// Matched index entry groups regions with conflicting emission vectors.
struct AmbiguousLmpError : Error {
  std::vector<int> region_ids;
  AmbiguousLmpError(const std::string& msg, std::vector<int> ids)
      : Error(msg), region_ids(std::move(ids)) {}
};

}  // namespace lmetk
