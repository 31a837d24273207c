#include "lmetk/lme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lmetk/errors.hpp"
#include "lmetk/simplex.hpp"

namespace lmetk {

PriceEmissionPair region_prices(const CriticalRegion& region,
                                const Eigen::VectorXd& cost,
                                const Eigen::VectorXd& emission) {
  PriceEmissionPair out;
  out.alpha = (cost.transpose() * region.G).transpose();
  out.beta = (emission.transpose() * region.G).transpose();
  out.region_id = region.id;
  return out;
}

int locate(const RegionDatabase& db, const Eigen::VectorXd& load, double tol) {
  if (load.size() != db.n_buses())
    throw ValidationError("load: wrong dimension");
  int nearest = -1;
  double nearest_violation = kInf;
  for (const auto& region : db.regions) {
    const double v = region.max_violation(load);
    if (v <= tol) return region.id;  // ids ascend, so ties pick the lowest
    if (v < nearest_violation) {
      nearest_violation = v;
      nearest = region.id;
    }
  }
  std::ostringstream msg;
  msg << "load is not covered by any region (nearest region " << nearest
      << ", violation " << nearest_violation << ")";
  throw LocateError(msg.str(), nearest, nearest_violation);
}

PriceEmissionPair lme_for_load(const RegionDatabase& db,
                               const Eigen::VectorXd& load) {
  const int id = locate(db, load);
  const CriticalRegion& region = db.regions[id];
  PriceEmissionPair out;
  out.alpha = region.alpha;
  out.beta = region.beta;
  out.region_id = id;
  return out;
}

namespace {

std::vector<long long> quantize(const Eigen::VectorXd& v, double q) {
  std::vector<long long> key(v.size());
  for (int j = 0; j < v.size(); ++j)
    key[j] = static_cast<long long>(std::llround(v(j) / q));
  return key;
}

}  // namespace

LmpIndex build_lmp_index(const RegionDatabase& db, double tol) {
  LmpIndex index;
  index.match_tolerance = tol;

  // Scan regions in quantized-alpha order so clustering is deterministic.
  std::vector<int> order(db.regions.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<std::vector<long long>> keys(db.regions.size());
  for (size_t i = 0; i < keys.size(); ++i)
    keys[i] = quantize(db.regions[i].alpha, 1e-9);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return db.regions[a].id < db.regions[b].id;
  });

  for (int idx : order) {
    const CriticalRegion& region = db.regions[idx];
    int found = -1;
    for (size_t e = 0; e < index.entries.size(); ++e) {
      const double d =
          (index.entries[e].alpha - region.alpha).cwiseAbs().maxCoeff();
      if (d <= tol) {
        found = static_cast<int>(e);
        break;
      }
    }
    if (found < 0) {
      LmpIndexEntry entry;
      entry.alpha = region.alpha;
      entry.beta = region.beta;
      entry.region_ids = {region.id};
      index.entries.push_back(std::move(entry));
    } else {
      LmpIndexEntry& entry = index.entries[found];
      entry.region_ids.push_back(region.id);
      if ((entry.beta - region.beta).cwiseAbs().maxCoeff() > 1e-9) {
        if (!entry.collision) entry.collision_betas.push_back(entry.beta);
        entry.collision = true;
        entry.collision_betas.push_back(region.beta);
      }
    }
  }
  for (const auto& entry : index.entries)
    if (entry.collision) index.audit_pass = false;
  return index;
}

const LmpIndexEntry& lmp_match(const LmpIndex& index,
                               const Eigen::VectorXd& alpha) {
  int best = -1;
  double best_dist = kInf;
  for (size_t e = 0; e < index.entries.size(); ++e) {
    const double d = (index.entries[e].alpha - alpha).cwiseAbs().maxCoeff();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(e);
    }
  }
  if (best < 0 || best_dist > index.match_tolerance)
    throw UnknownLmpError("no LMP index entry within the match tolerance");
  return index.entries[best];
}

Eigen::VectorXd lme_for_lmp(const LmpIndex& index,
                            const Eigen::VectorXd& alpha) {
  const LmpIndexEntry& entry = lmp_match(index, alpha);
  if (entry.collision) {
    std::ostringstream msg;
    msg << "LMP maps to conflicting LME vectors; regions [";
    for (size_t k = 0; k < entry.region_ids.size(); ++k)
      msg << (k ? " " : "") << entry.region_ids[k];
    msg << "], LME candidates:";
    for (const auto& cb : entry.collision_betas) {
      msg << " (";
      for (int j = 0; j < cb.size(); ++j) msg << (j ? "," : "") << cb(j);
      msg << ")";
    }
    throw AmbiguousLmpError(msg.str(), entry.region_ids);
  }
  return entry.beta;
}

}  // namespace lmetk
