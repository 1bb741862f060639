#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core/errors.hpp"
#include "sgmix/core/param_distance.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/lab/distances.hpp"
#include "sgmix/lab/injective_norm.hpp"
#include "sgmix/lab/moments.hpp"

namespace sgmix {

struct CollisionConfig {
  int mixtures = 2000;
  int k = 4;
  int d = 1;
  int R = 6;
  double delta_param_threshold = 0.1;
  double min_separation = 0.0;  // gamma: drop mean-sets with two means closer than gamma sqrt(d)
  int shortlist = 20000;        // pairs ranked by moment distance before the parameter filter
  int tv_evaluations = 300;     // qualifying pairs whose TV is measured
  int sweep_levels = 12;
  std::uint64_t seed = 0;
  DistanceConfig distance;       // TV estimation (quadrature when d <= 2)
  // Constants of the covering-number argument, carried for report annotation.
  double c0 = 8.0 * std::numbers::pi * std::numbers::e;
  double c1 = 36.0;

  void validate() const {
    if (mixtures < 2 || k < 1 || d < 1 || R < 1) throw InvalidInput("collision: mixtures >= 2, k, d, R >= 1");
    if (shortlist < 1 || tv_evaluations < 1 || sweep_levels < 2) {
      throw InvalidInput("collision: shortlist, tv_evaluations >= 1 and sweep_levels >= 2");
    }
  }
};

struct PairReport {
  int a = -1, b = -1;
  std::vector<double> order_distance;  // injective norm of M_r - M~_r, r = 1..R
  double moment_distance = 0.0;        // max over r
  double moment_eps = 0.0;             // smallest eps meeting the r-scaled tolerances eps_r
  double delta_param = 0.0;
  double tv = 0.0;
  double tv_ci = 0.0;
  double min_gap_a = 0.0, min_gap_b = 0.0;
};

struct SweepLevel {
  double tolerance = 0.0;
  int pairs = 0;
  double max_tv = 0.0;
  double median_tv = 0.0;
};

struct CollisionResult {
  PairReport best;
  std::vector<PairReport> evaluated;  // sorted by moment distance
  std::vector<SweepLevel> sweep;      // tolerances decreasing
  int sets_generated = 0;
  int sets_kept = 0;
  long pairs_ranked = 0;
  double min_moment_distance = 0.0;   // over all pairs, before the parameter filter
  double c0 = 0.0, c1 = 0.0;
};

// Smallest eps in (0, e^{-R/2}] with |dM_r| <= eps (r / (8 pi e sqrt(log(1/eps))))^r
// for every r. On that range the right side increases with eps, so bisection
// on log eps applies. Returns +inf when even the upper end fails.
inline double moment_matching_eps(const std::vector<double>& order_distance) {
  const int R = static_cast<int>(order_distance.size());
  const double c = 8.0 * std::numbers::pi * std::numbers::e;
  const auto ok = [&](double log_eps) {
    const double l = -log_eps;
    for (int r = 1; r <= R; ++r) {
      const double rhs_log = log_eps + r * std::log(r / (c * std::sqrt(l)));
      if (order_distance[r - 1] > 0.0 && std::log(order_distance[r - 1]) > rhs_log) return false;
    }
    return true;
  };
  double hi = -0.5 * R, lo = -700.0;
  if (!ok(hi)) return std::numeric_limits<double>::infinity();
  if (ok(lo)) return std::exp(lo);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return std::exp(hi);
}

inline double min_pairwise_gap(const std::vector<Vec>& means) {
  double g = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < means.size(); ++i)
    for (size_t j = i + 1; j < means.size(); ++j) g = std::min(g, (means[i] - means[j]).norm());
  return g;
}

// k means uniform in the radius-sqrt(d) ball, one substream per mixture.
inline std::vector<std::vector<Vec>> random_mean_sets(const CollisionConfig& cfg) {
  std::vector<std::vector<Vec>> sets;
  const double radius = std::sqrt(static_cast<double>(cfg.d));
  for (int m = 0; m < cfg.mixtures; ++m) {
    Rng rng(derive_seed(cfg.seed, "lab:collide-means", static_cast<std::uint64_t>(m)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> means;
    for (int j = 0; j < cfg.k; ++j) {
      Vec dir(cfg.d);
      for (int a = 0; a < cfg.d; ++a) dir(a) = normal(rng);
      dir /= dir.norm();
      means.push_back(dir * radius * std::pow(unif(rng), 1.0 / cfg.d));
    }
    sets.push_back(std::move(means));
  }
  return sets;
}

namespace detail {

inline std::vector<double> order_distances(const MomentVector& a, const MomentVector& b, bool injective,
                                           const InjectiveNormConfig& inj) {
  std::vector<double> out;
  for (size_t r = 0; r < a.tensors.size(); ++r) {
    const SymTensor diff = a.tensors[r] - b.tensors[r];
    out.push_back(injective ? injective_norm(diff, inj).value : diff.frobenius_norm());
  }
  return out;
}

}  // namespace detail

// Ranks all pairs of mean-sets by max_r moment distance, keeps those at
// parameter distance >= threshold, measures TV on the closest qualifying pairs
// and sweeps the moment tolerance downward over them.
inline CollisionResult collision_search(const std::vector<std::vector<Vec>>& sets, const CollisionConfig& cfg) {
  cfg.validate();
  CollisionResult res;
  res.c0 = cfg.c0;
  res.c1 = cfg.c1;
  res.sets_generated = static_cast<int>(sets.size());
  std::vector<int> kept;
  std::vector<MomentVector> moments;
  std::vector<double> gaps;
  const double sep = cfg.min_separation * std::sqrt(static_cast<double>(cfg.d));
  for (size_t s = 0; s < sets.size(); ++s) {
    const double gap = sets[s].size() > 1 ? min_pairwise_gap(sets[s]) : std::numeric_limits<double>::infinity();
    if (gap < sep) continue;
    kept.push_back(static_cast<int>(s));
    moments.push_back(mean_moments(sets[s], cfg.R));
    gaps.push_back(gap);
  }
  res.sets_kept = static_cast<int>(kept.size());
  if (kept.size() < 2) throw StageFailure("collision: fewer than two mean-sets survive the separation filter");

  // In d = 1 the moment differences are scalars; otherwise rank by the
  // Frobenius norm (an upper bound) and recompute injective norms on the shortlist.
  const bool scalar = cfg.d == 1;
  const InjectiveNormConfig inj{};
  struct Ranked {
    double dist;
    int i, j;
  };
  std::vector<Ranked> ranked;
  const int n = static_cast<int>(kept.size());
  ranked.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double m = 0.0;
      for (int r = 0; r < cfg.R; ++r) {
        const auto& ta = moments[i].tensors[r];
        const auto& tb = moments[j].tensors[r];
        if (scalar) {
          m = std::max(m, std::abs(ta[0] - tb[0]));
        } else {
          double s = 0.0;
          for (size_t e = 0; e < ta.size(); ++e) s += ta.multiplicity(e) * std::pow(ta[e] - tb[e], 2);
          m = std::max(m, std::sqrt(s));
        }
      }
      ranked.push_back({m, i, j});
    }
  }
  res.pairs_ranked = static_cast<long>(ranked.size());
  const size_t keep = std::min(ranked.size(), static_cast<size_t>(cfg.shortlist));
  const auto by_dist = [](const Ranked& x, const Ranked& y) {
    return x.dist != y.dist ? x.dist < y.dist : std::tie(x.i, x.j) < std::tie(y.i, y.j);
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(keep), ranked.end(), by_dist);
  ranked.resize(keep);
  res.min_moment_distance = ranked.front().dist;

  std::vector<PairReport> qualifying;
  for (const auto& p : ranked) {
    const auto ma = MixtureParams::standard(sets[kept[p.i]]);
    const auto mb = MixtureParams::standard(sets[kept[p.j]]);
    PairReport rep;
    rep.a = kept[p.i];
    rep.b = kept[p.j];
    rep.delta_param = param_distance(ma, mb).value;
    if (rep.delta_param < cfg.delta_param_threshold) continue;
    rep.order_distance = detail::order_distances(moments[p.i], moments[p.j], !scalar, inj);
    if (scalar) {
      for (auto& v : rep.order_distance) v = std::abs(v);
    }
    rep.moment_distance = *std::max_element(rep.order_distance.begin(), rep.order_distance.end());
    rep.moment_eps = moment_matching_eps(rep.order_distance);
    rep.min_gap_a = gaps[p.i];
    rep.min_gap_b = gaps[p.j];
    qualifying.push_back(std::move(rep));
  }
  if (qualifying.empty()) {
    throw StageFailure("collision: no pair in the shortlist reaches the parameter-distance threshold",
                       {{"stage", "collide"},
                        {"observed_min_moment_distance", res.min_moment_distance},
                        {"shortlist", keep}});
  }
  std::stable_sort(qualifying.begin(), qualifying.end(),
                   [](const PairReport& x, const PairReport& y) { return x.moment_distance < y.moment_distance; });
  if (qualifying.size() > static_cast<size_t>(cfg.tv_evaluations)) qualifying.resize(cfg.tv_evaluations);
  for (auto& rep : qualifying) {
    DistanceConfig dc = cfg.distance;
    dc.seed = derive_seed(cfg.distance.seed, "lab:collide-tv", static_cast<std::uint64_t>(rep.a),
                          static_cast<std::uint64_t>(rep.b));
    const auto tv = tv_distance(MixtureParams::standard(sets[rep.a]), MixtureParams::standard(sets[rep.b]), dc);
    rep.tv = tv.value;
    rep.tv_ci = tv.ci_half_width;
  }
  res.evaluated = qualifying;
  res.best = qualifying.front();

  const double top = qualifying.back().moment_distance, bottom = qualifying.front().moment_distance;
  for (int l = 0; l < cfg.sweep_levels; ++l) {
    const double frac = static_cast<double>(l) / (cfg.sweep_levels - 1);
    const double tol = bottom > 0.0 ? top * std::pow(bottom / top, frac) : top * (1.0 - frac);
    std::vector<double> tvs;
    for (const auto& rep : qualifying) {
      if (rep.moment_distance <= tol * (1.0 + 1e-12)) tvs.push_back(rep.tv);
    }
    SweepLevel lvl;
    lvl.tolerance = tol;
    lvl.pairs = static_cast<int>(tvs.size());
    if (!tvs.empty()) {
      lvl.max_tv = *std::max_element(tvs.begin(), tvs.end());
      std::nth_element(tvs.begin(), tvs.begin() + static_cast<long>(tvs.size() / 2), tvs.end());
      lvl.median_tv = tvs[tvs.size() / 2];
    }
    res.sweep.push_back(lvl);
  }
  return res;
}

inline CollisionResult collision_search(const CollisionConfig& cfg) {
  return collision_search(random_mean_sets(cfg), cfg);
}

inline nlohmann::json to_json(const PairReport& p) {
  return {{"a", p.a},
          {"b", p.b},
          {"order_distance", p.order_distance},
          {"moment_distance", p.moment_distance},
          {"moment_eps", p.moment_eps},
          {"delta_param", p.delta_param},
          {"tv", p.tv},
          {"tv_ci", p.tv_ci},
          {"min_gap_a", p.min_gap_a},
          {"min_gap_b", p.min_gap_b}};
}

inline nlohmann::json to_json(const CollisionResult& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& l : r.sweep) {
    sweep.push_back({{"tolerance", l.tolerance}, {"pairs", l.pairs}, {"max_tv", l.max_tv}, {"median_tv", l.median_tv}});
  }
  return {{"best", to_json(r.best)},
          {"sets_generated", r.sets_generated},
          {"sets_kept", r.sets_kept},
          {"pairs_ranked", r.pairs_ranked},
          {"min_moment_distance", r.min_moment_distance},
          {"evaluated", r.evaluated.size()},
          {"sweep", sweep},
          {"c0", r.c0},
          {"c1", r.c1}};
}

}  // namespace sgmix
