#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sgmix/core/gaussian_facts.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/init/density_estimate.hpp"

namespace sgmix {

struct SigmaEstimate {
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double tolerance = std::numeric_limits<double>::infinity();
  double kappa = 0.0;
  double log_ratio = 0.0;  // log(f(mu) / f(y))
  int attempts = 0;
  bool ok = false;
};

// sigma = kappa sqrt(d) / sqrt(log(f(mu) / f(y))) with y at distance
// kappa sqrt(d / pi) from mu. f(y) is averaged over the 2d axis points at that
// distance, which cancels the first-order effect of an off-center mu.
inline SigmaEstimate estimate_sigma(const Vec& mu, const DensityOracle& oracle, double kappa) {
  if (!(kappa > 0.0)) throw InvalidInput("estimate_sigma: kappa must be positive");
  const int d = static_cast<int>(mu.size());
  const double r = kappa * std::sqrt(static_cast<double>(d) / std::numbers::pi);
  RowMat pts(2 * d + 1, d);
  pts.row(0) = mu.transpose();
  for (int a = 0; a < d; ++a) {
    pts.row(1 + 2 * a) = mu.transpose();
    pts.row(2 + 2 * a) = mu.transpose();
    pts(1 + 2 * a, a) += r;
    pts(2 + 2 * a, a) -= r;
  }
  const auto est = oracle(pts);
  double fy = 0.0, fy_var = 0.0;
  for (int p = 1; p <= 2 * d; ++p) {
    fy += est[p].f;
    fy_var += est[p].f_se * est[p].f_se;
  }
  fy /= 2.0 * d;
  const double fy_se = std::sqrt(fy_var) / (2.0 * d);
  const double f0 = est[0].f;

  SigmaEstimate out;
  out.kappa = kappa;
  out.attempts = 1;
  if (!(f0 > 0.0)) return out;
  out.log_ratio = fy > 0.0 ? std::log(f0 / fy) : std::numeric_limits<double>::infinity();
  if (!(out.log_ratio > 0.0) || !std::isfinite(out.log_ratio)) return out;
  out.sigma = kappa * std::sqrt(static_cast<double>(d) / out.log_ratio);
  const double rel0 = est[0].f_se / f0, rely = fy_se / fy;
  const double log_se = std::sqrt(rel0 * rel0 + rely * rely);
  out.tolerance = 3.0 * out.sigma * log_se / (2.0 * out.log_ratio);
  out.ok = true;
  return out;
}

// Starts from kappa0 and doubles while the log-ratio is below d/4 (too small
// to resolve against the density noise) and kappa stays under kappa_cap;
// halves when f(y) vanishes.
inline SigmaEstimate estimate_sigma_adaptive(const Vec& mu, const DensityOracle& oracle, double kappa0,
                                             double kappa_cap) {
  const double target = static_cast<double>(mu.size()) / 4.0;
  double kappa = kappa0;
  int attempts = 0;
  SigmaEstimate out;
  for (int it = 0; it < 60; ++it) {
    out = estimate_sigma(mu, oracle, kappa);
    attempts += 1;
    if (std::isinf(out.log_ratio)) {
      kappa *= 0.5;
      continue;
    }
    if ((!out.ok || out.log_ratio < target) && 2.0 * kappa <= kappa_cap) {
      kappa *= 2.0;
      continue;
    }
    break;
  }
  out.attempts = attempts;
  return out;
}

struct WeightEstimate {
  double weight = 0.0;
  double in_ball_fraction = 0.0;
  double ball_radius = 0.0;
  double c_d = 0.0;
  double standard_error = 0.0;
};

// Fraction of samples within sqrt(d) sigma / sqrt(2 pi) of mu, divided by the
// mass c_d one component puts in that ball.
inline WeightEstimate estimate_weight(const Vec& mu, double sigma, const SampleBatch& samples) {
  if (mu.size() != samples.dim()) throw InvalidInput("estimate_weight: dimension mismatch");
  if (!(sigma > 0.0)) throw InvalidInput("estimate_weight: sigma must be positive");
  const int d = samples.dim();
  WeightEstimate out;
  out.ball_radius = std::sqrt(static_cast<double>(d)) * sigma / std::sqrt(2.0 * std::numbers::pi);
  out.c_d = ball_mass_constant(d);
  const double r2 = out.ball_radius * out.ball_radius;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    double dist2 = 0.0;
    for (int a = 0; a < d; ++a) dist2 += std::pow(samples.points(i, a) - mu(a), 2);
    hits += dist2 <= r2 ? 1 : 0;
  }
  const double n = static_cast<double>(samples.size());
  out.in_ball_fraction = static_cast<double>(hits) / n;
  out.weight = out.in_ball_fraction / out.c_d;
  out.standard_error = std::sqrt(out.in_ball_fraction * (1.0 - out.in_ball_fraction) / n) / out.c_d;
  return out;
}

}  // namespace sgmix
