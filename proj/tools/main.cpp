#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lmetk/bench.hpp"
#include "lmetk/errors.hpp"
#include "lmetk/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitAudit = 4;

Eigen::VectorXd parse_vector(const std::string& text, int expected) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
        ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      vals.push_back(v);
    } catch (const std::exception&) {
      throw lmetk::ValidationError("vector: cannot parse '" + tok + "'");
    }
  }
  if (expected >= 0 && static_cast<int>(vals.size()) != expected)
    throw lmetk::ValidationError("vector: expected " + std::to_string(expected) +
                                 " entries, got " + std::to_string(vals.size()));
  Eigen::VectorXd out(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) out(i) = vals[i];
  return out;
}

void check_fingerprint(const lmetk::RegionDatabase& db,
                       const lmetk::NetworkCase& net) {
  const std::string fp = lmetk::case_fingerprint(net);
  if (fp != db.case_fingerprint)
    throw lmetk::ValidationError("fingerprint mismatch: database was built from "
                                 "a different case (" +
                                 db.case_fingerprint + " vs " + fp + ")");
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lmetk::ValidationError("output: cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical-region toolkit for locational marginal emissions "
               "over DC economic dispatch"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "Enumerate the critical regions "
                                            "of a case and write a database");
  std::string build_case, build_out;
  double build_omega = -1.0;
  lmetk::EnumerateOptions eopt;
  eopt.workers = static_cast<int>(std::thread::hardware_concurrency());
  if (eopt.workers < 1) eopt.workers = 1;
  build->add_option("--case", build_case, "case JSON file")->required();
  build->add_option("--out", build_out, "database output path")->required();
  build->add_option("--omega", build_omega, "override the case operating range");
  build->add_option("--workers", eopt.workers, "probe worker threads");
  build->add_option("--cap", eopt.region_cap, "region-count safety cap");
  build->add_option("--seed", eopt.seed, "perturbation/coverage seed");
  build->add_option("--volume-samples", eopt.volume_samples,
                    "Monte-Carlo coverage samples");
  build->add_option("--cheb-tol", eopt.chebyshev_tol,
                    "full-dimensionality radius threshold (default 1e-7)");
  build->add_option("--feas-tol", eopt.sced.feas_tol,
                    "LP feasibility tolerance (default 1e-9)");
  build->add_option("--slack-tol", eopt.sced.slack_tol,
                    "active-set slack threshold (default 1e-7)");
  build->add_option("--dual-tol", eopt.sced.dual_tol,
                    "dual positivity threshold (default 1e-9)");

  // query-load
  auto* qload = app.add_subcommand("query-load", "LMP/LME for a load vector");
  std::string ql_db, ql_load, ql_case;
  qload->add_option("--db", ql_db, "region database")->required();
  qload->add_option("--load", ql_load, "comma-separated load vector")->required();
  qload->add_option("--case", ql_case, "case file (fingerprint check)");

  // query-lmp
  auto* qlmp = app.add_subcommand("query-lmp", "LME for a released LMP vector");
  std::string qp_db, qp_lmp, qp_case;
  double qp_tol = 1e-6;
  qlmp->add_option("--db", qp_db, "region database")->required();
  qlmp->add_option("--lmp", qp_lmp, "comma-separated LMP vector")->required();
  qlmp->add_option("--case", qp_case, "case file (fingerprint check)");
  qlmp->add_option("--tol", qp_tol, "LMP match tolerance (default 1e-6)");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Timing comparison of the "
                                                "lookup and per-sample methods");
  std::string bm_db, bm_case, bm_out, bm_format = "json";
  lmetk::TimingOptions topt;
  bench->add_option("--db", bm_db, "region database")->required();
  bench->add_option("--case", bm_case, "case JSON file")->required();
  bench->add_option("--samples", topt.n_samples, "sample count (>= 100)");
  bench->add_option("--seed", topt.seed, "sample seed");
  bench->add_flag("--strict-fd", topt.strict_fd,
                  "re-solve the finite-difference base point per node");
  bench->add_option("--fd-delta", topt.fd.delta,
                    "finite-difference step factor (default 1e-4)");
  bench->add_flag("--central", topt.fd.central, "central differences");
  bench->add_option("--margin", topt.boundary_margin,
                    "region-boundary rejection margin (default 1e-6)");
  bench->add_option("--format", bm_format, "json (summary) or csv (per sample)")
      ->check(CLI::IsMember({"json", "csv"}));
  bench->add_option("--out", bm_out, "write output to a file instead of stdout");

  // robustness
  auto* robust = app.add_subcommand("robustness", "Estimate emissions under "
                                                  "load perturbations");
  std::string rb_db, rb_case, rb_out, rb_format = "json";
  lmetk::RobustnessOptions ropt;
  robust->add_option("--db", rb_db, "region database")->required();
  robust->add_option("--case", rb_case, "case JSON file")->required();
  robust->add_option("--perturb", ropt.perturbation,
                     "perturbation fraction (default 0.01)");
  robust->add_option("--samples", ropt.n_samples, "sample count");
  robust->add_option("--seed", ropt.seed, "sample seed");
  robust->add_option("--threshold", ropt.error_threshold,
                     "relative-error reporting threshold (default 0.005)");
  robust->add_option("--format", rb_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  robust->add_option("--out", rb_out, "write output to a file instead of stdout");

  // audit
  auto* audit = app.add_subcommand("audit", "Verify the LMP->LME uniqueness "
                                            "condition over the database");
  std::string au_db;
  double au_tol = 1e-6;
  audit->add_option("--db", au_db, "region database")->required();
  audit->add_option("--tol", au_tol, "LMP clustering tolerance (default 1e-6)");

  // export-regions
  auto* exp = app.add_subcommand("export-regions", "Plot-ready region table");
  std::string ex_db, ex_out, ex_format = "csv";
  exp->add_option("--db", ex_db, "region database")->required();
  exp->add_option("--format", ex_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  exp->add_option("--out", ex_out, "write output to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (build->parsed()) {
      lmetk::NetworkCase net = lmetk::parse_case_file(build_case);
      if (build_omega >= 0.0) {
        if (build_omega >= 1.0)
          throw lmetk::ValidationError("omega: must lie in [0, 1)");
        net.omega = build_omega;
      }
      lmetk::LoadPolytope poly = lmetk::case_polytope(net);
      lmetk::RegionDatabase db = lmetk::enumerate_regions(net, poly, eopt);
      lmetk::db_save(db, build_out);
      std::printf("built %d regions (%d degenerate probes, %d infeasible "
                  "probes, %d spurious)\n",
                  db.stats.regions_found, db.stats.degenerate_count,
                  db.stats.infeasible_probes, db.stats.spurious_regions);
      std::printf("coverage estimate: %.2f%% of the dispatchable polytope\n",
                  100.0 * db.stats.explored_volume_fraction);
      std::printf("database written: %s\n", build_out.c_str());
      if (db.stats.incomplete) {
        std::fprintf(stderr, "warning: region cap exceeded; partial database "
                             "saved with incomplete flag\n");
        return kExitInfeasible;
      }
      return kExitOk;
    }

    if (qload->parsed()) {
      const lmetk::RegionDatabase db = lmetk::db_load(ql_db);
      if (!ql_case.empty())
        check_fingerprint(db, lmetk::parse_case_file(ql_case));
      const Eigen::VectorXd l = parse_vector(ql_load, db.n_buses());
      const lmetk::PriceEmissionPair pe = lmetk::lme_for_load(db, l);
      const lmetk::LmpIndex index = lmetk::build_lmp_index(db);
      std::cout << lmetk::query_result_json(pe, index.audit_pass);
      return kExitOk;
    }

    if (qlmp->parsed()) {
      const lmetk::RegionDatabase db = lmetk::db_load(qp_db);
      if (!qp_case.empty())
        check_fingerprint(db, lmetk::parse_case_file(qp_case));
      const Eigen::VectorXd alpha = parse_vector(qp_lmp, db.n_buses());
      const lmetk::LmpIndex index = lmetk::build_lmp_index(db, qp_tol);
      const lmetk::LmpIndexEntry& entry = lmetk::lmp_match(index, alpha);
      const Eigen::VectorXd beta = lmetk::lme_for_lmp(index, alpha);
      std::cout << lmetk::lmp_result_json(beta, entry.region_ids.front());
      return kExitOk;
    }

    if (bench->parsed()) {
      const lmetk::RegionDatabase db = lmetk::db_load(bm_db);
      const lmetk::NetworkCase net = lmetk::parse_case_file(bm_case);
      check_fingerprint(db, net);
      const lmetk::TimingSummary s = lmetk::run_timing(net, db, topt);
      write_or_print(bm_format == "csv" ? lmetk::timing_to_csv(s)
                                        : lmetk::timing_to_json(s),
                     bm_out);
      return kExitOk;
    }

    if (robust->parsed()) {
      const lmetk::RegionDatabase db = lmetk::db_load(rb_db);
      const lmetk::NetworkCase net = lmetk::parse_case_file(rb_case);
      check_fingerprint(db, net);
      const lmetk::RobustnessReport r = lmetk::run_robustness(net, db, ropt);
      write_or_print(rb_format == "csv" ? lmetk::robustness_to_csv(r)
                                        : lmetk::robustness_to_json(r),
                     rb_out);
      return kExitOk;
    }

    if (audit->parsed()) {
      const lmetk::RegionDatabase db = lmetk::db_load(au_db);
      const lmetk::LmpIndex index = lmetk::build_lmp_index(db, au_tol);
      std::printf("lmp index entries: %zu\n", index.entries.size());
      for (size_t e = 0; e < index.entries.size(); ++e) {
        const auto& entry = index.entries[e];
        std::printf("entry %zu: %zu region(s)%s\n", e, entry.region_ids.size(),
                    entry.collision ? " COLLISION" : "");
      }
      std::printf("audit: %s\n", index.audit_pass ? "pass" : "FAIL");
      return index.audit_pass ? kExitOk : kExitAudit;
    }

    if (exp->parsed()) {
      const lmetk::RegionDatabase db = lmetk::db_load(ex_db);
      write_or_print(ex_format == "csv" ? lmetk::regions_to_csv(db)
                                        : lmetk::regions_to_json(db),
                     ex_out);
      return kExitOk;
    }
  } catch (const lmetk::AmbiguousLmpError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitAudit;
  } catch (const lmetk::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const lmetk::InfeasibleError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const lmetk::DegenerateError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const lmetk::LocateError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const lmetk::UnknownLmpError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
