#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgmix/core/mixture.hpp"
#include "sgmix/numerics/quadrature.hpp"

namespace sgmix {

// Upper bound on |p - q|_1 for weighted spherical Gaussian densities
// p = w1 g(mu1, sigma1), q = w2 g(mu2, sigma2), oriented with sigma2 in the
// denominators as in the Pinsker/KL argument.
inline double tv_upper_bound_pinsker(const Component& p, const Component& q) {
  if (!(p.sigma > 0.0) || !(q.sigma > 0.0)) throw InvalidInput("pinsker bound: sigma must be positive");
  if (p.mean.size() != q.mean.size()) throw InvalidInput("pinsker bound: dimension mismatch");
  const double d = static_cast<double>(p.mean.size());
  const double s1 = p.sigma, s2 = q.sigma;
  const double shape = std::sqrt(2.0 * std::numbers::pi) * (p.mean - q.mean).norm() / s2 +
                       std::sqrt(d * std::abs(s1 * s1 - s2 * s2)) / s2 +
                       std::sqrt(2.0 * d * std::abs(std::log(s2 / s1)));
  return std::abs(p.weight - q.weight) + std::min(p.weight, q.weight) * shape;
}

struct NormTailBound {
  double upper_threshold = 0.0;  // Pr[|x|^2 >= upper_threshold] <= bound
  double lower_threshold = 0.0;  // Pr[|x|^2 <= lower_threshold] <= bound
  double bound = 0.0;
};

// Tail bounds for x ~ g(0, 1) in d dimensions (per-coordinate variance 1/(2 pi)).
inline NormTailBound gaussian_norm_tail(int d, double t) {
  if (!(t > 0.0)) throw InvalidInput("gaussian_norm_tail: t must be positive");
  const double dd = static_cast<double>(d);
  const double two_pi = 2.0 * std::numbers::pi;
  NormTailBound out;
  out.upper_threshold = (dd + 2.0 * std::sqrt(dd * t) + 2.0 * t) / two_pi;
  out.lower_threshold = std::max(0.0, (dd - 2.0 * std::sqrt(dd * t)) / two_pi);
  out.bound = std::exp(-t);
  return out;
}

// c_d = integral of exp(-pi |x|^2) over the ball of radius sqrt(d / (2 pi)),
// by radial quadrature: S_{d-1} int_0^r0 r^{d-1} exp(-pi r^2) dr.
inline double ball_mass_constant(int d) {
  if (d < 1) throw InvalidInput("ball_mass_constant: d must be positive");
  const double pi = std::numbers::pi;
  const double dd = static_cast<double>(d);
  const double r0 = std::sqrt(dd / (2.0 * pi));
  const double sphere = 2.0 * std::pow(pi, dd / 2.0) / std::tgamma(dd / 2.0);
  const auto radial = [&](double r) { return std::pow(r, dd - 1.0) * std::exp(-pi * r * r); };
  const double scale = std::pow(r0, dd);  // keeps the absolute tolerance meaningful
  return sphere * integrate(radial, 0.0, r0, 1e-13 * scale).value;
}

}  // namespace sgmix
