#pragma once

#include <string>

#include "lmetk/bench.hpp"
#include "lmetk/regions.hpp"

namespace lmetk {

// Canonical JSON form of a validated case (fixed key order, effective PTDF
// included); the fingerprint is an FNV-1a 64-bit hash of that text.
std::string canonical_case_json(const NetworkCase& net);
std::string case_fingerprint(const NetworkCase& net);

// Full-precision, byte-deterministic database serialization; write -> read
// -> write is the identity on bytes.
std::string db_to_string(const RegionDatabase& db);
RegionDatabase db_from_string(const std::string& text);
void db_save(const RegionDatabase& db, const std::string& path);
RegionDatabase db_load(const std::string& path);

std::string dispatch_to_json(const DispatchSolution& sol);
std::string query_result_json(const PriceEmissionPair& pair, bool audit_pass);
std::string lmp_result_json(const Eigen::VectorXd& beta, int matched_region);

std::string timing_to_csv(const TimingSummary& s);
std::string timing_to_json(const TimingSummary& s);
std::string robustness_to_csv(const RobustnessReport& r);
std::string robustness_to_json(const RobustnessReport& r);
std::string regions_to_csv(const RegionDatabase& db);
std::string regions_to_json(const RegionDatabase& db);

}  // namespace lmetk
