#include "lmetk/serialize.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lmetk/errors.hpp"

namespace lmetk {

using ojson = nlohmann::ordered_json;

namespace {

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

ojson vec_to_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from_json(const ojson& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

ojson mat_to_json(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r)));
  return rows;
}

Eigen::MatrixXd mat_from_json(const ojson& rows) {
  const int nr = static_cast<int>(rows.size());
  if (nr == 0) return Eigen::MatrixXd(0, 0);
  const int nc = static_cast<int>(rows[0].size());
  Eigen::MatrixXd m(nr, nc);
  for (int r = 0; r < nr; ++r) m.row(r) = vec_from_json(rows[r]);
  return m;
}

const char* source_name(HsSource s) {
  switch (s) {
    case HsSource::Box: return "box";
    case HsSource::Extra: return "extra";
    case HsSource::Row: return "row";
  }
  return "?";
}

HsSource source_from(const std::string& s) {
  if (s == "box") return HsSource::Box;
  if (s == "extra") return HsSource::Extra;
  if (s == "row") return HsSource::Row;
  throw ValidationError("database: unknown halfspace source '" + s + "'");
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string canonical_case_json(const NetworkCase& net) {
  ojson doc;
  doc["buses"] = net.n_buses;
  doc["reference_bus"] = net.reference_bus;
  doc["generators"] = ojson::array();
  for (const auto& g : net.generators) {
    ojson jg;
    jg["bus"] = g.bus;
    jg["cost"] = g.cost;
    jg["emission_rate"] = g.emission_rate;
    jg["capacity"] = g.capacity;
    if (!g.fuel.empty()) jg["fuel"] = g.fuel;
    doc["generators"].push_back(std::move(jg));
  }
  doc["lines"] = ojson::array();
  for (const auto& ln : net.lines) {
    ojson jl;
    jl["from"] = ln.from;
    jl["to"] = ln.to;
    if (ln.has_reactance) jl["reactance"] = ln.reactance;
    jl["limit"] = ln.flow_upper;
    jl["lower_limit"] = ln.flow_lower;
    doc["lines"].push_back(std::move(jl));
  }
  doc["ptdf"] = mat_to_json(net.ptdf);
  doc["nominal_load"] = vec_to_json(net.nominal_load);
  doc["omega"] = net.omega;
  return doc.dump();
}

std::string case_fingerprint(const NetworkCase& net) {
  return fnv1a_hex(canonical_case_json(net));
}

std::string db_to_string(const RegionDatabase& db) {
  ojson doc;
  doc["format"] = "lmetk-region-db-v1";
  doc["case_fingerprint"] = db.case_fingerprint;
  doc["incomplete"] = db.stats.incomplete;

  ojson poly;
  poly["nominal_load"] = vec_to_json(db.polytope.nominal);
  poly["omega"] = db.polytope.omega;
  poly["extra_halfspaces"] = ojson::array();
  for (const auto& h : db.polytope.extra) {
    ojson jh;
    jh["normal"] = vec_to_json(h.normal);
    jh["offset"] = h.offset;
    poly["extra_halfspaces"].push_back(std::move(jh));
  }
  doc["polytope"] = std::move(poly);

  ojson stats;
  stats["regions_found"] = db.stats.regions_found;
  stats["degenerate_count"] = db.stats.degenerate_count;
  stats["infeasible_probes"] = db.stats.infeasible_probes;
  stats["spurious_regions"] = db.stats.spurious_regions;
  stats["probes"] = db.stats.probes;
  stats["explored_volume_fraction"] = db.stats.explored_volume_fraction;
  doc["build_stats"] = std::move(stats);

  doc["regions"] = ojson::array();
  for (const auto& r : db.regions) {
    ojson jr;
    jr["id"] = r.id;
    jr["active_signature"] = r.active_signature;
    jr["halfspaces"] = ojson::array();
    for (const auto& th : r.halfspaces) {
      ojson jh;
      jh["normal"] = vec_to_json(th.hs.normal);
      jh["offset"] = th.hs.offset;
      jh["source"] = source_name(th.source);
      if (th.source == HsSource::Row) jh["row"] = th.row;
      jr["halfspaces"].push_back(std::move(jh));
    }
    jr["G"] = mat_to_json(r.G);
    jr["alpha"] = vec_to_json(r.alpha);
    jr["beta"] = vec_to_json(r.beta);
    ojson anchors;
    anchors["l"] = vec_to_json(r.l_anchor);
    anchors["x"] = vec_to_json(r.x_anchor);
    anchors["lambda"] = vec_to_json(r.lambda_anchor);
    anchors["mu"] = r.mu_anchor;
    jr["anchors"] = std::move(anchors);
    jr["degenerate"] = r.degenerate;
    doc["regions"].push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

RegionDatabase db_from_string(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("database: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "lmetk-region-db-v1")
    throw ValidationError("database: unrecognized format");

  RegionDatabase db;
  db.case_fingerprint = doc["case_fingerprint"].get<std::string>();
  db.stats.incomplete = doc["incomplete"].get<bool>();
  const auto& poly = doc["polytope"];
  db.polytope.nominal = vec_from_json(poly["nominal_load"]);
  db.polytope.omega = poly["omega"].get<double>();
  for (const auto& jh : poly["extra_halfspaces"])
    db.polytope.extra.push_back(
        Halfspace{vec_from_json(jh["normal"]), jh["offset"].get<double>()});

  const auto& stats = doc["build_stats"];
  db.stats.regions_found = stats["regions_found"].get<int>();
  db.stats.degenerate_count = stats["degenerate_count"].get<int>();
  db.stats.infeasible_probes = stats["infeasible_probes"].get<int>();
  db.stats.spurious_regions = stats["spurious_regions"].get<int>();
  db.stats.probes = stats["probes"].get<int>();
  db.stats.explored_volume_fraction =
      stats["explored_volume_fraction"].get<double>();

  for (const auto& jr : doc["regions"]) {
    CriticalRegion r;
    r.id = jr["id"].get<int>();
    r.active_signature = jr["active_signature"].get<std::vector<int>>();
    for (const auto& jh : jr["halfspaces"]) {
      TaggedHalfspace th;
      th.hs.normal = vec_from_json(jh["normal"]);
      th.hs.offset = jh["offset"].get<double>();
      th.source = source_from(jh["source"].get<std::string>());
      th.row = jh.contains("row") ? jh["row"].get<int>() : -1;
      r.halfspaces.push_back(std::move(th));
    }
    r.G = mat_from_json(jr["G"]);
    r.alpha = vec_from_json(jr["alpha"]);
    r.beta = vec_from_json(jr["beta"]);
    r.l_anchor = vec_from_json(jr["anchors"]["l"]);
    r.x_anchor = vec_from_json(jr["anchors"]["x"]);
    r.lambda_anchor = vec_from_json(jr["anchors"]["lambda"]);
    r.mu_anchor = jr["anchors"]["mu"].get<double>();
    r.degenerate = jr["degenerate"].get<bool>();
    db.regions.push_back(std::move(r));
  }
  return db;
}

void db_save(const RegionDatabase& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("database: cannot write '" + path + "'");
  out << db_to_string(db);
}

RegionDatabase db_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("database: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return db_from_string(ss.str());
}

std::string dispatch_to_json(const DispatchSolution& sol) {
  ojson doc;
  doc["x"] = vec_to_json(sol.x);
  doc["cost"] = sol.cost;
  doc["emissions"] = sol.emissions;
  doc["lambda"] = vec_to_json(sol.lambda);
  doc["mu"] = sol.mu;
  doc["active_set"] = sol.active_set;
  doc["degenerate"] = sol.degenerate;
  return doc.dump(2) + "\n";
}

std::string query_result_json(const PriceEmissionPair& pair, bool audit_pass) {
  ojson doc;
  doc["region_id"] = pair.region_id;
  doc["alpha"] = vec_to_json(pair.alpha);
  doc["beta"] = vec_to_json(pair.beta);
  doc["audit_pass"] = audit_pass;
  return doc.dump(2) + "\n";
}

std::string lmp_result_json(const Eigen::VectorXd& beta, int matched_region) {
  ojson doc;
  doc["beta"] = vec_to_json(beta);
  doc["matched_region"] = matched_region;
  return doc.dump(2) + "\n";
}

std::string timing_to_csv(const TimingSummary& s) {
  std::ostringstream os;
  const int n = s.reports.empty() || s.reports[0].lme_results.empty()
                    ? 0
                    : static_cast<int>(s.reports[0].lme_results[0].size());
  os << "sample_id,method,time_s";
  for (int j = 0; j < n; ++j) os << ",beta_" << j;
  os << "\n";
  for (const auto& rep : s.reports) {
    for (size_t k = 0; k < rep.per_sample_times.size(); ++k) {
      os << k << "," << bench_method_name(rep.method) << ","
         << fmt17(rep.per_sample_times[k]);
      for (int j = 0; j < n; ++j) os << "," << fmt17(rep.lme_results[k](j));
      os << "\n";
    }
  }
  return os.str();
}

std::string timing_to_json(const TimingSummary& s) {
  ojson doc;
  doc["n_samples"] = s.n_samples;
  doc["strict_fd"] = s.strict_fd;
  doc["methods"] = ojson::array();
  for (const auto& rep : s.reports) {
    ojson jm;
    jm["method"] = bench_method_name(rep.method);
    jm["mean_s"] = rep.mean;
    jm["stddev_s"] = rep.stddev;
    jm["mismatches_vs_load_lookup"] = rep.mismatch_count;
    jm["lp_solves_per_sample"] = rep.solves_per_sample;
    doc["methods"].push_back(std::move(jm));
  }
  doc["speedup_load_lookup_vs_implicit"] = s.speedup_region_vs_implicit;
  doc["speedup_lmp_vs_load_lookup"] = s.speedup_lmp_vs_load;
  return doc.dump(2) + "\n";
}

std::string robustness_to_csv(const RobustnessReport& r) {
  std::ostringstream os;
  os << "sample_id,same_region,actual_emissions,frozen_estimate,"
        "relocated_estimate,frozen_rel_error,relocated_rel_error\n";
  for (size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    os << k << "," << (s.same_region ? 1 : 0) << ","
       << fmt17(s.actual_emissions) << "," << fmt17(s.frozen_estimate) << ","
       << fmt17(s.relocated_estimate) << "," << fmt17(s.frozen_rel_error)
       << "," << fmt17(s.relocated_rel_error) << "\n";
  }
  return os.str();
}

std::string robustness_to_json(const RobustnessReport& r) {
  ojson doc;
  doc["n_samples"] = static_cast<int>(r.samples.size());
  doc["perturbation"] = r.perturbation;
  doc["error_threshold"] = r.error_threshold;
  doc["frozen_within_fraction"] = r.frozen_within_fraction;
  doc["relocated_within_fraction"] = r.relocated_within_fraction;
  doc["base_emissions"] = r.base_emissions;

  // Error histogram, plot-ready.
  const std::vector<double> edges = {1e-6, 1e-5, 1e-4, 1e-3, 5e-3, 1e-2, 1e-1};
  auto hist = [&](auto pick) {
    std::vector<int> counts(edges.size() + 1, 0);
    for (const auto& s : r.samples) {
      const double v = pick(s);
      size_t b = 0;
      while (b < edges.size() && v >= edges[b]) ++b;
      ++counts[b];
    }
    return counts;
  };
  doc["error_bucket_edges"] = edges;
  doc["frozen_error_histogram"] =
      hist([](const RobustnessSample& s) { return s.frozen_rel_error; });
  doc["relocated_error_histogram"] =
      hist([](const RobustnessSample& s) { return s.relocated_rel_error; });
  return doc.dump(2) + "\n";
}

std::string regions_to_csv(const RegionDatabase& db) {
  std::ostringstream os;
  os << "region_id,bus,alpha,beta\n";
  for (const auto& r : db.regions)
    for (int j = 0; j < r.alpha.size(); ++j)
      os << r.id << "," << j << "," << fmt17(r.alpha(j)) << ","
         << fmt17(r.beta(j)) << "\n";
  return os.str();
}

std::string regions_to_json(const RegionDatabase& db) {
  ojson doc;
  doc["regions"] = ojson::array();
  for (const auto& r : db.regions) {
    ojson jr;
    jr["id"] = r.id;
    jr["active_signature"] = r.active_signature;
    jr["alpha"] = vec_to_json(r.alpha);
    jr["beta"] = vec_to_json(r.beta);
    doc["regions"].push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

}  // namespace lmetk
