#include "lmetk/bench.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "lmetk/errors.hpp"

namespace lmetk {

bool FdResult::ok() const {
  for (const auto& e : node_errors)
    if (!e.empty()) return false;
  return true;
}

FdResult fd_lme(const NetworkCase& net, const Eigen::VectorXd& load,
                const FdOptions& opt, bool strict) {
  const int n = net.n_buses;
  const CompactForm compact = build_compact(net);
  const Eigen::VectorXd c = net.cost_vector(), e = net.emission_vector();

  FdResult out;
  out.beta = Eigen::VectorXd::Zero(n);
  out.node_errors.assign(n, "");

  double base_emissions = 0.0;
  if (!opt.central && !strict) {
    base_emissions = solve_sced(compact, c, e, load).emissions;
    ++out.solves;
  }

  for (int j = 0; j < n; ++j) {
    const double step = opt.delta * std::max(1.0, load(j));
    try {
      Eigen::VectorXd up = load;
      up(j) += step;
      const double e_up = solve_sced(compact, c, e, up).emissions;
      ++out.solves;
      double e_lo;
      double denom = step;
      if (opt.central) {
        Eigen::VectorXd dn = load;
        dn(j) -= step;
        if (dn(j) < 0.0) throw ValidationError("central step leaves l >= 0");
        e_lo = solve_sced(compact, c, e, dn).emissions;
        ++out.solves;
        denom = 2.0 * step;
      } else if (strict) {
        e_lo = solve_sced(compact, c, e, load).emissions;
        ++out.solves;
      } else {
        e_lo = base_emissions;
      }
      out.beta(j) = (e_up - e_lo) / denom;
    } catch (const Error& err) {
      out.beta(j) = std::numeric_limits<double>::quiet_NaN();
      out.node_errors[j] = err.what();
    }
  }
  return out;
}

Eigen::VectorXd if_lme(const NetworkCase& net, const Eigen::VectorXd& load) {
  const CompactForm compact = build_compact(net);
  const DispatchSolution sol =
      solve_sced(compact, net.cost_vector(), net.emission_vector(), load);
  if (sol.degenerate)
    throw DegenerateError(
        "sample is degenerate; perturb the load into a region interior",
        sol.active_set);
  const SensitivityMatrix sens = sensitivity_at(compact, sol, load);
  return (net.emission_vector().transpose() * sens.G).transpose();
}

std::string bench_method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::RegionLookup: return "load-lookup";
    case BenchMethod::LmpLookup: return "lmp-lookup";
    case BenchMethod::ImplicitFn: return "implicit-function";
    case BenchMethod::FiniteDiff: return "finite-difference";
  }
  return "?";
}

Eigen::VectorXd sample_region_interior(const RegionDatabase& db,
                                       std::mt19937_64& rng, double margin) {
  const LoadPolytope& poly = db.polytope;
  const std::vector<int> free_dims = poly.free_dims();
  const Eigen::VectorXd lo = poly.lower(), up = poly.upper();
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  for (int tries = 0; tries < 100000; ++tries) {
    Eigen::VectorXd l = poly.nominal;
    for (int j : free_dims) l(j) = lo(j) + uni(rng) * (up(j) - lo(j));
    bool ok = true;
    for (const auto& h : poly.extra)
      if (h.normal.dot(l) > h.offset - margin) { ok = false; break; }
    if (!ok) continue;
    for (const auto& region : db.regions) {
      if (!region.contains(l, 1e-9)) continue;
      // Interior with margin, ignoring pinned (frozen) directions.
      bool interior = true;
      for (const auto& th : region.halfspaces) {
        double free_part = 0.0;
        for (int j : free_dims) free_part += std::abs(th.hs.normal(j));
        if (free_part <= 1e-12) continue;
        if (th.hs.normal.dot(l) > th.hs.offset - margin) {
          interior = false;
          break;
        }
      }
      if (interior) return l;
      break;
    }
  }
  throw Error("interior sampling failed; polytope coverage too thin");
}

namespace {

void finalize_stats(BenchReport& r) {
  const size_t n = r.per_sample_times.size();
  if (n == 0) return;
  double sum = std::accumulate(r.per_sample_times.begin(),
                               r.per_sample_times.end(), 0.0);
  r.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double t : r.per_sample_times) ss += (t - r.mean) * (t - r.mean);
  r.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

double rel_linf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TimingSummary run_timing(const NetworkCase& net, const RegionDatabase& db,
                         const TimingOptions& opt) {
  if (opt.n_samples < 100)
    throw ValidationError("benchmark: need at least 100 samples");
  using clock = std::chrono::steady_clock;

  TimingSummary sum;
  sum.n_samples = opt.n_samples;
  sum.strict_fd = opt.strict_fd;

  std::mt19937_64 rng(opt.seed);
  sum.samples.reserve(opt.n_samples);
  for (int s = 0; s < opt.n_samples; ++s)
    sum.samples.push_back(
        sample_region_interior(db, rng, opt.boundary_margin));

  const LmpIndex index = build_lmp_index(db);
  std::vector<Eigen::VectorXd> sample_lmps;
  sample_lmps.reserve(opt.n_samples);
  for (const auto& l : sum.samples)
    sample_lmps.push_back(lme_for_load(db, l).alpha);

  const int n = net.n_buses;
  const int warm = std::min(opt.warmup, opt.n_samples);

  // The lookups finish in well under a microsecond; each timed block runs
  // them lookup_reps times so scheduler hiccups and clock overhead do not
  // swamp the per-sample figure.
  const int reps = std::max(1, opt.lookup_reps);

  BenchReport region{BenchMethod::RegionLookup, {}, 0, 0, {}, 0, 0};
  for (int s = 0; s < warm; ++s) (void)lme_for_load(db, sum.samples[s]);
  for (const auto& l : sum.samples) {
    PriceEmissionPair pe;
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r) pe = lme_for_load(db, l);
    const auto t1 = clock::now();
    region.per_sample_times.push_back(
        std::chrono::duration<double>(t1 - t0).count() / reps);
    region.lme_results.push_back(std::move(pe.beta));
  }
  finalize_stats(region);

  BenchReport lmp{BenchMethod::LmpLookup, {}, 0, 0, {}, 0, 0};
  for (int s = 0; s < warm; ++s) (void)lme_for_lmp(index, sample_lmps[s]);
  for (int s = 0; s < opt.n_samples; ++s) {
    Eigen::VectorXd beta;
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r) beta = lme_for_lmp(index, sample_lmps[s]);
    const auto t1 = clock::now();
    lmp.per_sample_times.push_back(
        std::chrono::duration<double>(t1 - t0).count() / reps);
    lmp.lme_results.push_back(std::move(beta));
  }
  finalize_stats(lmp);

  BenchReport implicit{BenchMethod::ImplicitFn, {}, 0, 0, {}, 0, 1};
  for (int s = 0; s < warm; ++s) (void)if_lme(net, sum.samples[s]);
  for (const auto& l : sum.samples) {
    const auto t0 = clock::now();
    Eigen::VectorXd beta = if_lme(net, l);
    const auto t1 = clock::now();
    implicit.per_sample_times.push_back(
        std::chrono::duration<double>(t1 - t0).count());
    implicit.lme_results.push_back(std::move(beta));
  }
  finalize_stats(implicit);

  BenchReport fd{BenchMethod::FiniteDiff, {}, 0, 0, {}, 0,
                 opt.strict_fd ? 2L * n : n + 1L};
  for (int s = 0; s < warm; ++s)
    (void)fd_lme(net, sum.samples[s], opt.fd, opt.strict_fd);
  for (const auto& l : sum.samples) {
    const auto t0 = clock::now();
    FdResult r = fd_lme(net, l, opt.fd, opt.strict_fd);
    const auto t1 = clock::now();
    fd.per_sample_times.push_back(
        std::chrono::duration<double>(t1 - t0).count());
    fd.lme_results.push_back(std::move(r.beta));
    fd.solves_per_sample = r.solves;
  }
  finalize_stats(fd);

  for (int s = 0; s < opt.n_samples; ++s) {
    if (rel_linf(implicit.lme_results[s], region.lme_results[s]) > 1e-4)
      ++implicit.mismatch_count;
    if (rel_linf(fd.lme_results[s], region.lme_results[s]) > 1e-4)
      ++fd.mismatch_count;
    if (rel_linf(lmp.lme_results[s], region.lme_results[s]) > 1e-4)
      ++lmp.mismatch_count;
  }

  sum.speedup_region_vs_implicit =
      region.mean > 0.0 ? implicit.mean / region.mean : 0.0;
  sum.speedup_lmp_vs_load = lmp.mean > 0.0 ? region.mean / lmp.mean : 0.0;
  sum.reports = {std::move(region), std::move(lmp), std::move(implicit),
                 std::move(fd)};
  return sum;
}

RobustnessReport run_robustness(const NetworkCase& net,
                                const RegionDatabase& db,
                                const RobustnessOptions& opt) {
  RobustnessReport rep;
  rep.perturbation = opt.perturbation;
  rep.error_threshold = opt.error_threshold;
  rep.base_load = db.polytope.nominal;

  const CompactForm compact = build_compact(net);
  const Eigen::VectorXd c = net.cost_vector(), e = net.emission_vector();
  rep.base_emissions = solve_sced(compact, c, e, rep.base_load).emissions;
  const Eigen::VectorXd frozen_beta = if_lme(net, rep.base_load);
  const int base_region = locate(db, rep.base_load);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int frozen_ok = 0, relocated_ok = 0;

  for (int s = 0; s < opt.n_samples; ++s) {
    RobustnessSample rs;
    rs.load = rep.base_load;
    for (int j = 0; j < rs.load.size(); ++j)
      rs.load(j) *= 1.0 + opt.perturbation * uni(rng);

    rs.actual_emissions = solve_sced(compact, c, e, rs.load).emissions;
    const Eigen::VectorXd dl = rs.load - rep.base_load;
    rs.frozen_estimate = rep.base_emissions + frozen_beta.dot(dl);
    const int rid = locate(db, rs.load);
    rs.relocated_estimate =
        rep.base_emissions + db.regions[rid].beta.dot(dl);
    rs.same_region = rid == base_region;

    const double scale = std::max(1.0, std::abs(rs.actual_emissions));
    rs.frozen_rel_error =
        std::abs(rs.frozen_estimate - rs.actual_emissions) / scale;
    rs.relocated_rel_error =
        std::abs(rs.relocated_estimate - rs.actual_emissions) / scale;
    if (rs.frozen_rel_error < opt.error_threshold) ++frozen_ok;
    if (rs.relocated_rel_error < opt.error_threshold) ++relocated_ok;
    rep.samples.push_back(std::move(rs));
  }
  const double denom = std::max(1, opt.n_samples);
  rep.frozen_within_fraction = frozen_ok / denom;
  rep.relocated_within_fraction = relocated_ok / denom;
  return rep;
}

}  // namespace lmetk
