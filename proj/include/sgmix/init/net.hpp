#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "sgmix/core/mixture.hpp"
#include "sgmix/core/sampling.hpp"

namespace sgmix {

struct NetConfig {
  double radius = 1.0;                  // 2 rho
  double spacing = 0.1;
  double estimation_ball_radius = 0.25;
  double density_accuracy = 0.0;        // gamma, reported for reference
  double eps0 = std::exp(-4.0);         // exp(-c0 d)
  double c0 = 2.0;
  Vec center;                           // empty means the origin
  double max_points = 1e8;

  // Values from the net argument: eps0 = exp(-c0 d), spacing from
  // eps0 sqrt(d) sigma_min^3 / (64 sigma_max^2) shrunk so the grid's covering
  // radius (sqrt(d)/2) spacing stays within it, gamma for target accuracy delta.
  static NetConfig defaults(const DerivedStats& s, int d, double delta = 0.1, double c0 = 2.0) {
    NetConfig cfg;
    const double dd = static_cast<double>(d);
    cfg.c0 = c0;
    cfg.eps0 = std::exp(-c0 * dd);
    cfg.radius = 2.0 * s.rho;
    const double net_delta = cfg.eps0 * std::sqrt(dd) * std::pow(s.sigma_min, 3) / (64.0 * s.sigma_max * s.sigma_max);
    cfg.spacing = net_delta * std::min(1.0, 2.0 / std::sqrt(dd));
    cfg.density_accuracy = s.w_min * std::pow(s.sigma_max, -(dd + 4.0)) * std::pow(cfg.eps0, 3) * delta * delta / 4.0;
    cfg.estimation_ball_radius = 0.25 * s.sigma_min;
    return cfg;
  }
};

// Axis-aligned grid with the given spacing, restricted to the ball of the given
// radius around the center. One point per row.
inline RowMat build_net(const NetConfig& cfg, int d) {
  if (d < 1) throw InvalidInput("build_net: dimension must be positive");
  if (!(cfg.spacing > 0.0) || !(cfg.radius > 0.0)) throw InvalidInput("build_net: spacing and radius must be positive");
  const Vec center = cfg.center.size() == 0 ? Vec::Zero(d) : cfg.center;
  if (center.size() != d) throw InvalidInput("build_net: center dimension mismatch");
  const long half = static_cast<long>(std::floor(cfg.radius / cfg.spacing + 1e-9));
  const double per_axis = 2.0 * static_cast<double>(half) + 1.0;
  const double total = std::pow(per_axis, d);
  if (total > cfg.max_points) {
    const double needed = 2.0 * cfg.radius / (std::pow(cfg.max_points, 1.0 / d) - 1.0);
    throw InvalidInput("build_net: grid would hold " + std::to_string(total) + " points; spacing of at least " +
                       std::to_string(needed) + " keeps it under the guard");
  }
  std::vector<double> coords;
  std::vector<long> idx(static_cast<size_t>(d), -half);
  const double r2 = cfg.radius * cfg.radius * (1.0 + 1e-12);
  Eigen::Index count = 0;
  while (true) {
    double norm2 = 0.0;
    for (int a = 0; a < d; ++a) norm2 += std::pow(static_cast<double>(idx[a]) * cfg.spacing, 2);
    if (norm2 <= r2) {
      for (int a = 0; a < d; ++a) coords.push_back(center(a) + static_cast<double>(idx[a]) * cfg.spacing);
      ++count;
    }
    int a = d - 1;
    while (a >= 0 && idx[a] == half) idx[a--] = -half;
    if (a < 0) break;
    ++idx[a];
  }
  RowMat net(count, d);
  std::copy(coords.begin(), coords.end(), net.data());
  return net;
}

}  // namespace sgmix
