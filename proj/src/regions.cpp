#include "lmetk/regions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <thread>

#include "lmetk/errors.hpp"
#include "lmetk/simplex.hpp"
#include "lmetk/lme.hpp"
#include "lmetk/serialize.hpp"

namespace lmetk {

bool CriticalRegion::contains(const Eigen::VectorXd& l, double tol) const {
  for (const auto& th : halfspaces)
    if (th.hs.normal.dot(l) > th.hs.offset + tol) return false;
  return true;
}

double CriticalRegion::max_violation(const Eigen::VectorXd& l) const {
  double worst = -kInf;
  for (const auto& th : halfspaces)
    worst = std::max(worst, th.hs.normal.dot(l) - th.hs.offset);
  return worst;
}

namespace {

std::vector<TaggedHalfspace> polytope_rows(const LoadPolytope& poly,
                                           const std::vector<int>& free_dims,
                                           bool pins_only) {
  const int n = static_cast<int>(poly.nominal.size());
  const Eigen::VectorXd lo = poly.lower(), up = poly.upper();
  std::vector<bool> is_free(n, false);
  for (int j : free_dims) is_free[j] = true;

  std::vector<TaggedHalfspace> rows;
  for (int j = 0; j < n; ++j) {
    if (is_free[j] == pins_only) continue;
    TaggedHalfspace upr;
    upr.hs.normal = Eigen::VectorXd::Zero(n);
    upr.hs.normal(j) = 1.0;
    upr.hs.offset = up(j);
    upr.source = HsSource::Box;
    rows.push_back(upr);
    TaggedHalfspace lor;
    lor.hs.normal = Eigen::VectorXd::Zero(n);
    lor.hs.normal(j) = -1.0;
    lor.hs.offset = -lo(j);
    lor.source = HsSource::Box;
    rows.push_back(lor);
  }
  if (!pins_only)
    for (const auto& h : poly.extra)
      rows.push_back({h, HsSource::Extra, -1});
  return rows;
}

std::vector<Halfspace> bare(const std::vector<TaggedHalfspace>& rows) {
  std::vector<Halfspace> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.hs);
  return out;
}

}  // namespace

std::optional<CriticalRegion> define_region(const CompactForm& compact,
                                            const Eigen::VectorXd& cost,
                                            const SensitivityMatrix& sens,
                                            const DispatchSolution& anchor_sol,
                                            const Eigen::VectorXd& anchor_load,
                                            const LoadPolytope& polytope,
                                            double chebyshev_tol) {
  const int g = compact.n_gens();
  const int p = compact.n_rows();
  const int n = compact.n_buses();
  const std::vector<int>& sig = anchor_sol.active_set;
  if (static_cast<int>(sig.size()) != g - 1)
    throw DegenerateError("define_region: active set is not a simple vertex", sig);

  std::vector<bool> active(p, false);
  for (int i : sig) active[i] = true;

  // Canonical affine policy x(l) = G l + t from the active system alone, so
  // the stored region does not depend on which probe point found it.
  Eigen::MatrixXd K(g, g);
  Eigen::VectorXd kb(g);
  for (int r = 0; r < g - 1; ++r) {
    K.row(r) = compact.A.row(sig[r]);
    kb(r) = compact.b(sig[r]);
  }
  K.row(g - 1).setOnes();
  kb(g - 1) = 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> luK(K);
  if (!luK.isInvertible())
    throw DegenerateError("define_region: active system singular", sig);
  const Eigen::VectorXd t = luK.solve(kb);

  // Inactive-row feasibility of the policy, in load space.
  std::vector<TaggedHalfspace> candidates;
  for (int i = 0; i < p; ++i) {
    if (active[i]) continue;
    TaggedHalfspace th;
    th.hs.normal = (compact.A.row(i) * sens.G - compact.F.row(i)).transpose();
    th.hs.offset = compact.b(i) - compact.A.row(i).dot(t);
    th.source = HsSource::Row;
    th.row = i;
    if (th.hs.normal.cwiseAbs().maxCoeff() <= 1e-12) {
      if (th.hs.offset < -1e-9) return std::nullopt;  // policy never feasible
      continue;                                       // vacuous row
    }
    candidates.push_back(std::move(th));
  }

  const std::vector<int> free_dims = polytope.free_dims();
  const Eigen::VectorXd frozen = polytope.nominal;
  for (auto& th : polytope_rows(polytope, free_dims, false))
    candidates.push_back(std::move(th));

  ChebyshevResult cheb =
      chebyshev_center(bare(candidates), free_dims, frozen);
  if (!cheb.feasible ||
      (std::isfinite(cheb.radius) && cheb.radius < chebyshev_tol))
    return std::nullopt;  // empty or lower-dimensional

  std::vector<int> keep;
  try {
    keep = irredundant_rows(bare(candidates), free_dims, frozen, 1e-9);
  } catch (const DegenerateError&) {
    return std::nullopt;
  }

  CriticalRegion region;
  region.active_signature = sig;
  region.halfspaces = polytope_rows(polytope, free_dims, true);  // pins
  for (int idx : keep) region.halfspaces.push_back(candidates[idx]);

  // The probe point that produced this signature must sit inside; a
  // violation marks a numerically spurious active set.
  if (!region.contains(anchor_load, 1e-7)) return std::nullopt;

  // Canonical anchor at the reduced region's own Chebyshev center.
  cheb = chebyshev_center(bare(region.halfspaces), free_dims, frozen);
  if (!cheb.feasible) return std::nullopt;
  region.l_anchor = cheb.center;
  region.G = sens.G;
  region.dLambda = Eigen::MatrixXd::Zero(p, n);
  region.x_anchor = sens.G * region.l_anchor + t;

  // Multipliers from stationarity restricted to the active rows:
  // [A_act^T | -1] [lambda_act; mu] = -c.
  Eigen::MatrixXd Kt(g, g);
  Kt.leftCols(g - 1) = K.topRows(g - 1).transpose();
  Kt.col(g - 1) = -Eigen::VectorXd::Ones(g);
  Eigen::FullPivLU<Eigen::MatrixXd> luKt(Kt);
  if (!luKt.isInvertible()) return std::nullopt;
  const Eigen::VectorXd lam_mu = luKt.solve(-cost);
  region.lambda_anchor = Eigen::VectorXd::Zero(p);
  for (int r = 0; r < g - 1; ++r) region.lambda_anchor(sig[r]) = lam_mu(r);
  region.mu_anchor = lam_mu(g - 1);
  if (region.lambda_anchor.minCoeff() < -1e-7) return std::nullopt;

  return region;
}

namespace {

struct Piece {
  std::vector<Halfspace> rows;
  long counter = 0;
};

enum class ProbeKind { Drop, DropDegenerate, Carve, Found };

struct ProbeOutcome {
  ProbeKind kind = ProbeKind::Drop;
  Halfspace carve;
  std::vector<int> signature;
  std::optional<CriticalRegion> region;
  bool spurious = false;
  std::exception_ptr error;
};

}  // namespace

RegionDatabase enumerate_regions(const NetworkCase& net,
                                 const LoadPolytope& polytope,
                                 const EnumerateOptions& opt) {
  const int n = net.n_buses;
  if (polytope.nominal.size() != n)
    throw ValidationError("polytope: nominal load has wrong dimension");
  const CompactForm compact = build_compact(net);
  const Eigen::VectorXd cost = net.cost_vector();
  const Eigen::VectorXd emission = net.emission_vector();
  const std::vector<int> free_dims = polytope.free_dims();
  const Eigen::VectorXd frozen = polytope.nominal;

  // The nominal point must dispatch; propagate InfeasibleError otherwise.
  solve_sced(compact, cost, emission, polytope.nominal, opt.sced);

  RegionDatabase db;
  db.polytope = polytope;
  db.case_fingerprint = case_fingerprint(net);

  std::deque<Piece> queue;
  Piece root;
  root.rows = bare(polytope_rows(polytope, free_dims, false));
  {
    const ChebyshevResult c0 = chebyshev_center(root.rows, free_dims, frozen);
    if (!c0.feasible) throw ValidationError("polytope: empty");
  }
  queue.push_back(std::move(root));
  long piece_counter = 0;

  std::vector<CriticalRegion> regions;
  std::map<std::vector<int>, int> seen;
  BuildStats stats;
  const long probe_limit = 200 + 50L * opt.region_cap;

  auto probe = [&](const Piece& piece) -> ProbeOutcome {
    ProbeOutcome out;
    try {
      const ChebyshevResult cheb =
          chebyshev_center(piece.rows, free_dims, frozen);
      if (!cheb.feasible ||
          (std::isfinite(cheb.radius) && cheb.radius < opt.chebyshev_tol)) {
        out.kind = ProbeKind::Drop;
        return out;
      }
      std::mt19937_64 rng(opt.seed ^
                          (0x9E3779B97F4A7C15ULL * (piece.counter + 1)));
      Eigen::VectorXd l = cheb.center;
      const double nudge =
          std::min(1e-5 * (1.0 + polytope.nominal.norm()),
                   std::isfinite(cheb.radius) ? 0.45 * cheb.radius : 1.0);

      for (int attempt = 0; attempt <= opt.degenerate_retries; ++attempt) {
        DispatchSolution sol;
        try {
          sol = solve_sced(compact, cost, emission, l, opt.sced);
        } catch (const InfeasibleError& inf) {
          // Carve away the load set this certificate proves infeasible:
          // feasibility requires w.l + s >= 0.
          Eigen::VectorXd w = Eigen::VectorXd::Constant(
              n, inf.balance_multiplier);
          double s = 0.0;
          for (size_t k = 0; k < inf.certificate_rows.size(); ++k) {
            const int row = inf.certificate_rows[k];
            w += inf.certificate_values[k] * compact.F.row(row).transpose();
            s += inf.certificate_values[k] * compact.b(row);
          }
          if (-w.dot(l) <= s + 1e-12) {
            // Certificate fails to exclude the probe; give up on the piece.
            out.kind = ProbeKind::DropDegenerate;
            return out;
          }
          out.kind = ProbeKind::Carve;
          out.carve = Halfspace{-w, s};
          return out;
        }

        if (!sol.degenerate) {
          try {
            const SensitivityMatrix sens = sensitivity_at(compact, sol, l);
            out.kind = ProbeKind::Found;
            out.signature = sol.active_set;
            out.region = define_region(compact, cost, sens, sol, l, polytope,
                                       opt.chebyshev_tol);
            out.spurious = !out.region.has_value();
            return out;
          } catch (const DegenerateError&) {
            // fall through to a perturbed retry
          }
        }
        if (free_dims.empty()) break;  // a point polytope cannot be nudged
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int j : free_dims) dir(j) = gauss(rng);
        const double norm = dir.norm();
        if (norm > 0.0) l = cheb.center + (nudge / norm) * dir;
      }
      out.kind = ProbeKind::DropDegenerate;
      return out;
    } catch (...) {
      out.error = std::current_exception();
      return out;
    }
  };

  while (!queue.empty() && !stats.incomplete) {
    std::vector<Piece> generation(std::make_move_iterator(queue.begin()),
                                  std::make_move_iterator(queue.end()));
    queue.clear();
    stats.probes += static_cast<int>(generation.size());
    if (stats.probes > probe_limit) {
      stats.incomplete = true;
      break;
    }

    std::vector<ProbeOutcome> outcomes(generation.size());
    const int workers =
        std::max(1, std::min<int>(opt.workers,
                                  static_cast<int>(generation.size())));
    if (workers <= 1) {
      for (size_t i = 0; i < generation.size(); ++i)
        outcomes[i] = probe(generation[i]);
    } else {
      std::atomic<size_t> next{0};
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (size_t i = next.fetch_add(1); i < generation.size();
               i = next.fetch_add(1))
            outcomes[i] = probe(generation[i]);
        });
      for (auto& th : pool) th.join();
    }

    // Merge strictly in submission order so results do not depend on the
    // worker count.
    for (size_t i = 0; i < generation.size(); ++i) {
      ProbeOutcome& oc = outcomes[i];
      if (oc.error) std::rethrow_exception(oc.error);
      Piece& piece = generation[i];

      switch (oc.kind) {
        case ProbeKind::Drop:
          break;
        case ProbeKind::DropDegenerate:
          ++stats.degenerate_count;
          break;
        case ProbeKind::Carve: {
          ++stats.infeasible_probes;
          Piece child;
          child.rows = piece.rows;
          child.rows.push_back(oc.carve);
          child.counter = ++piece_counter;
          queue.push_back(std::move(child));
          break;
        }
        case ProbeKind::Found: {
          int idx = -1;
          if (auto it = seen.find(oc.signature); it != seen.end()) {
            idx = it->second;
          } else if (oc.spurious) {
            ++stats.spurious_regions;
            break;
          } else {
            if (static_cast<int>(regions.size()) >= opt.region_cap) {
              stats.incomplete = true;
              break;
            }
            idx = static_cast<int>(regions.size());
            regions.push_back(std::move(*oc.region));
            seen.emplace(oc.signature, idx);
          }
          // Set-difference partition: negate each retained internal facet in
          // turn, keeping the previous ones.
          const CriticalRegion& reg = regions[idx];
          std::vector<Halfspace> prefix;
          for (const auto& th : reg.halfspaces) {
            if (th.source != HsSource::Row) continue;
            Piece child;
            child.rows = piece.rows;
            child.rows.insert(child.rows.end(), prefix.begin(), prefix.end());
            child.rows.push_back(Halfspace{-th.hs.normal, -th.hs.offset});
            child.counter = ++piece_counter;
            queue.push_back(std::move(child));
            prefix.push_back(th.hs);
          }
          break;
        }
      }
      if (stats.incomplete) break;
    }
  }

  // Canonical presentation: regions sorted by signature, ids reassigned.
  std::sort(regions.begin(), regions.end(),
            [](const CriticalRegion& a, const CriticalRegion& b) {
              return a.active_signature < b.active_signature;
            });
  for (size_t i = 0; i < regions.size(); ++i) {
    regions[i].id = static_cast<int>(i);
    const PriceEmissionPair pe = region_prices(regions[i], cost, emission);
    regions[i].alpha = pe.alpha;
    regions[i].beta = pe.beta;
  }
  db.regions = std::move(regions);

  // Monte-Carlo coverage of the dispatchable part of the polytope.
  stats.regions_found = static_cast<int>(db.regions.size());
  if (opt.volume_samples > 0 && !db.regions.empty()) {
    std::mt19937_64 rng(opt.seed ^ 0xC0FFEE123456789ULL);
    const Eigen::VectorXd lo = polytope.lower(), up = polytope.upper();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    long covered = 0, feasible_missed = 0;
    for (int s = 0; s < opt.volume_samples; ++s) {
      Eigen::VectorXd l = frozen;
      for (int j : free_dims) l(j) = lo(j) + uni(rng) * (up(j) - lo(j));
      bool in_extra = true;
      for (const auto& h : polytope.extra)
        if (h.normal.dot(l) > h.offset + 1e-9) { in_extra = false; break; }
      if (!in_extra) continue;
      bool hit = false;
      for (const auto& r : db.regions)
        if (r.contains(l, 1e-9)) { hit = true; break; }
      if (hit) {
        ++covered;
      } else {
        try {
          solve_sced(compact, cost, emission, l, opt.sced);
          ++feasible_missed;
        } catch (const InfeasibleError&) {
        }
      }
    }
    const long denom = covered + feasible_missed;
    stats.explored_volume_fraction =
        denom > 0 ? static_cast<double>(covered) / denom : 1.0;
  } else if (!db.regions.empty()) {
    stats.explored_volume_fraction = 1.0;
  }
  db.stats = stats;
  return db;
}

}  // namespace lmetk
