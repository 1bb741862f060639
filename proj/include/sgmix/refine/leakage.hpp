#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sgmix/core/mixture.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/numerics/quadrature.hpp"
#include "sgmix/refine/region.hpp"

namespace sgmix {

struct RegionLeakage {
  double own_mass = 0.0;            // integral of g_j over S_j
  double own_mass_se = 0.0;
  double cross_mass = 0.0;          // sum_{i != j} w_i integral of g_i over S_j
  double cross_mass_se = 0.0;
  double own_threshold = 0.0;       // 1 - 1/(8 pi d)
  double cross_threshold = 0.0;     // w_j / (16 pi d)
  bool own_ok = false;
  bool cross_ok = false;
};

// Region j is paired with component j of the mixture. Quadrature in one
// dimension; Monte Carlo with `samples` draws per component otherwise, where
// the pass flags use the point estimate plus three standard errors.
inline std::vector<RegionLeakage> leakage_report(const MixtureParams& mix, const std::vector<Region>& regions,
                                                 Eigen::Index samples = 400000, std::uint64_t seed = 0) {
  const int k = mix.k(), d = mix.dim();
  if (static_cast<int>(regions.size()) != k) throw InvalidInput("leakage_report: region count differs from k");
  const double pi = std::numbers::pi;
  // mass[i][j] = integral of g_i over S_j, and its standard error
  std::vector<std::vector<double>> mass(k, std::vector<double>(k, 0.0)), se(k, std::vector<double>(k, 0.0));
  if (d == 1) {
    for (int i = 0; i < k; ++i) {
      const double s = std_dev_from_sigma(mix[i].sigma);
      for (int j = 0; j < k; ++j) {
        const double half = regions[j].half_length_1d();
        const double z = regions[j].anchor(0), mu = mix[i].mean(0);
        // Closed-form normal CDF differences lose relative precision in the far
        // tail, so integrate the density directly.
        const double lo = std::max(z - half, mu - 40 * s), hi = std::min(z + half, mu + 40 * s);
        if (!(lo < hi)) continue;
        const auto g = [&](double y) { return std::exp(-pi * (y - mu) * (y - mu) / (mix[i].sigma * mix[i].sigma)) / mix[i].sigma; };
        std::vector<double> pts{lo, hi};
        for (double m : {-3.0, 0.0, 3.0})
          if (mu + m * s > lo && mu + m * s < hi) pts.push_back(mu + m * s);
        mass[i][j] = integrate_with_breaks(g, pts, 1e-15).value;
      }
    }
  } else {
    std::vector<double> u(static_cast<size_t>(d));
    for (int i = 0; i < k; ++i) {
      Rng rng(derive_seed(seed, "leakage:component", static_cast<std::uint64_t>(i)));
      std::normal_distribution<double> normal(0.0, 1.0);
      const double s = std_dev_from_sigma(mix[i].sigma);
      std::vector<double> hits(static_cast<size_t>(k), 0.0);
      for (Eigen::Index t = 0; t < samples; ++t) {
        Vec y(d);
        for (int a = 0; a < d; ++a) y(a) = mix[i].mean(a) + s * normal(rng);
        for (int j = 0; j < k; ++j) {
          for (int a = 0; a < d; ++a) u[a] = y(a) - regions[j].anchor(a);
          if (regions[j].contains_offset(u.data())) hits[j] += 1.0;
        }
      }
      for (int j = 0; j < k; ++j) {
        const double p = hits[j] / static_cast<double>(samples);
        mass[i][j] = p;
        // Wilson-style floor keeps zero-hit cells from claiming zero uncertainty.
        se[i][j] = std::sqrt(std::max(p * (1 - p), 1.0 / samples) / static_cast<double>(samples));
      }
    }
  }
  std::vector<RegionLeakage> out(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    RegionLeakage& r = out[j];
    r.own_mass = mass[j][j];
    r.own_mass_se = se[j][j];
    double var = 0.0;
    for (int i = 0; i < k; ++i) {
      if (i == j) continue;
      r.cross_mass += mix[i].weight * mass[i][j];
      var += std::pow(mix[i].weight * se[i][j], 2);
    }
    r.cross_mass_se = std::sqrt(var);
    r.own_threshold = 1.0 - 1.0 / (8.0 * pi * d);
    r.cross_threshold = mix[j].weight / (16.0 * pi * d);
    r.own_ok = r.own_mass - 3.0 * r.own_mass_se >= r.own_threshold;
    r.cross_ok = r.cross_mass + 3.0 * r.cross_mass_se < r.cross_threshold;
  }
  return out;
}

}  // namespace sgmix
