#pragma once

#include <cmath>
#include <numbers>

#include "sgmix/core/mixture.hpp"

namespace sgmix {

inline void check_dim(const MixtureParams& mix, const Vec& x) {
  if (x.size() != mix.dim()) throw InvalidInput("point dimension does not match mixture");
}

// sigma^{-d} exp(-pi |x - mu|^2 / sigma^2), without the weight.
inline double component_density(const Component& c, const Vec& x) {
  const double d = static_cast<double>(x.size());
  const double r2 = (x - c.mean).squaredNorm();
  return std::pow(c.sigma, -d) * std::exp(-std::numbers::pi * r2 / (c.sigma * c.sigma));
}

inline double pdf_at(const MixtureParams& mix, const Vec& x) {
  check_dim(mix, x);
  double f = 0.0;
  for (const auto& c : mix.components()) f += c.weight * component_density(c, x);
  return f;
}

inline Vec grad_pdf_at(const MixtureParams& mix, const Vec& x) {
  check_dim(mix, x);
  Vec g = Vec::Zero(mix.dim());
  for (const auto& c : mix.components()) {
    const double s2 = c.sigma * c.sigma;
    g -= (2.0 * std::numbers::pi * c.weight / s2 * component_density(c, x)) * (x - c.mean);
  }
  return g;
}

inline Mat hess_pdf_at(const MixtureParams& mix, const Vec& x) {
  check_dim(mix, x);
  const int d = mix.dim();
  const double pi = std::numbers::pi;
  Mat h = Mat::Zero(d, d);
  for (const auto& c : mix.components()) {
    const double s2 = c.sigma * c.sigma;
    const Vec u = x - c.mean;
    const double scale = 4.0 * pi * pi * c.weight / s2 * component_density(c, x);
    h += scale * (u * u.transpose() / s2 - Mat::Identity(d, d) / (2.0 * pi));
  }
  return h;
}

}  // namespace sgmix
