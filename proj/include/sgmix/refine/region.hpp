#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sgmix/core/mixture.hpp"

namespace sgmix {

// Known weights and sigmas of the components being refined.
struct KnownParams {
  std::vector<double> weights;
  std::vector<double> sigmas;

  int k() const { return static_cast<int>(weights.size()); }
  static KnownParams from(const MixtureParams& m) { return {m.weights(), m.sigmas()}; }
};

// Intersection of slabs |<y - z, e_l>| <= slab_halfwidth toward the other
// anchors and the ball |y - z| <= ball_radius.
struct Region {
  Vec anchor;
  std::vector<Vec> slab_directions;
  double slab_halfwidth = std::numeric_limits<double>::infinity();
  double ball_radius = std::numeric_limits<double>::infinity();

  static Region unbounded(const Vec& anchor) { return Region{anchor, {}, std::numeric_limits<double>::infinity(),
                                                             std::numeric_limits<double>::infinity()}; }

  int dim() const { return static_cast<int>(anchor.size()); }

  // Membership of y = anchor + u.
  bool contains_offset(const double* u) const {
    const int d = dim();
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += u[a] * u[a];
    if (r2 > ball_radius * ball_radius) return false;
    for (const auto& e : slab_directions) {
      double dot = 0.0;
      for (int a = 0; a < d; ++a) dot += u[a] * e(a);
      if (std::abs(dot) > slab_halfwidth) return false;
    }
    return true;
  }

  // In one dimension every constraint is a symmetric interval about the anchor;
  // returns the half-length of their intersection.
  double half_length_1d() const {
    return slab_directions.empty() ? ball_radius : std::min(ball_radius, slab_halfwidth);
  }
};

inline bool region_contains(const Region& r, const Vec& y) {
  if (y.size() != r.anchor.size()) throw InvalidInput("region_contains: dimension mismatch");
  const Vec u = y - r.anchor;
  return r.contains_offset(u.data());
}

inline std::vector<Region> build_regions(const std::vector<Vec>& initializers, const KnownParams& known,
                                         const DerivedStats& stats) {
  const int k = static_cast<int>(initializers.size());
  if (k < 1) throw InvalidInput("build_regions: need at least one initializer");
  if (known.k() != k || static_cast<int>(known.sigmas.size()) != k) {
    throw InvalidInput("build_regions: known parameters do not match initializer count");
  }
  const int d = static_cast<int>(initializers.front().size());
  const double halfwidth_unit = std::sqrt(std::log(stats.rho_sigma / stats.w_min));
  const double radius_unit = std::sqrt(static_cast<double>(d)) + std::sqrt(std::log(stats.rho_sigma * stats.rho_w));
  std::vector<Region> regions;
  for (int j = 0; j < k; ++j) {
    if (initializers[j].size() != d) throw InvalidInput("build_regions: initializers disagree on dimension");
    Region r;
    r.anchor = initializers[j];
    for (int l = 0; l < k; ++l) {
      if (l == j) continue;
      const Vec diff = initializers[l] - initializers[j];
      const double n = diff.norm();
      if (!(n > 0.0)) throw InvalidInput("build_regions: coincident initializers");
      r.slab_directions.push_back(diff / n);
    }
    r.slab_halfwidth = k > 1 ? 4.0 * halfwidth_unit * known.sigmas[j] : std::numeric_limits<double>::infinity();
    r.ball_radius = 4.0 * radius_unit * known.sigmas[j];
    regions.push_back(std::move(r));
  }
  return regions;
}

}  // namespace sgmix
