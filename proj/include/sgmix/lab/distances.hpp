#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sgmix/core/density.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/numerics/quadrature.hpp"

namespace sgmix {

enum class DistanceMethod { Auto, Quadrature, MonteCarlo };

struct DistanceConfig {
  DistanceMethod method = DistanceMethod::Auto;
  Eigen::Index samples = 200000;  // per mixture, Monte Carlo path
  std::uint64_t seed = 0;
  double abs_tol = 1e-12;
};

struct DistanceEstimate {
  double value = 0.0;
  double ci_half_width = 0.0;  // quadrature error estimate, or 3 standard errors
  bool monte_carlo = false;
};

namespace detail {

inline void check_pair(const MixtureParams& f, const MixtureParams& g) {
  if (f.dim() != g.dim()) throw InvalidInput("distance: mixtures differ in dimension");
}

// Box covering every mean +- 8 sigma_max along each axis.
inline std::pair<Vec, Vec> covering_box(const MixtureParams& f, const MixtureParams& g) {
  const int d = f.dim();
  Vec lo = Vec::Constant(d, 1e300), hi = Vec::Constant(d, -1e300);
  for (const auto* m : {&f, &g}) {
    for (const auto& c : m->components()) {
      lo = lo.cwiseMin((c.mean.array() - 8.0 * c.sigma).matrix());
      hi = hi.cwiseMax((c.mean.array() + 8.0 * c.sigma).matrix());
    }
  }
  return {lo, hi};
}

inline double pdf1(const MixtureParams& m, double x) {
  double s = 0.0;
  for (const auto& c : m.components()) {
    const double u = (x - c.mean(0)) / c.sigma;
    s += c.weight / c.sigma * std::exp(-std::numbers::pi * u * u);
  }
  return s;
}

// Sign changes of h on [a, b], located by a grid scan and bisection.
template <class H>
std::vector<double> sign_changes(const H& h, double a, double b, int grid = 4000) {
  std::vector<double> roots;
  double x0 = a, h0 = h(a);
  for (int i = 1; i <= grid; ++i) {
    const double x1 = a + (b - a) * i / grid, h1 = h(x1);
    if (h1 == 0.0 && h0 != 0.0) {
      roots.push_back(x1);
    } else if ((h0 < 0.0 && h1 > 0.0) || (h0 > 0.0 && h1 < 0.0)) {
      double l = x0, r = x1, hl = h0;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (l + r), hm = h(m);
        if ((hm < 0.0) == (hl < 0.0)) {
          l = m;
          hl = hm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    x0 = x1;
    h0 = h1;
  }
  return roots;
}

inline std::vector<double> breakpoints_1d(const MixtureParams& f, const MixtureParams& g, double a, double b) {
  std::vector<double> pts{a, b};
  for (const auto* m : {&f, &g})
    for (const auto& c : m->components()) pts.push_back(c.mean(0));
  const auto roots = sign_changes([&](double x) { return pdf1(f, x) - pdf1(g, x); }, a, b);
  pts.insert(pts.end(), roots.begin(), roots.end());
  return pts;
}

// Integral of phi(f(x), g(x)) over the covering box, nested adaptive in d = 2.
template <class Phi>
DistanceEstimate quadrature_integral(const MixtureParams& f, const MixtureParams& g, const Phi& phi, double tol) {
  const auto [lo, hi] = covering_box(f, g);
  DistanceEstimate out;
  if (f.dim() == 1) {
    const auto pts = breakpoints_1d(f, g, lo(0), hi(0));
    const auto r = integrate_with_breaks([&](double x) { return phi(pdf1(f, x), pdf1(g, x)); }, pts, tol);
    out.value = r.value;
    out.ci_half_width = r.error;
    return out;
  }
  if (f.dim() != 2) throw InvalidInput("quadrature distances support d <= 2");
  std::vector<double> ybreaks{lo(1), hi(1)}, xbreaks{lo(0), hi(0)};
  for (const auto* m : {&f, &g}) {
    for (const auto& c : m->components()) {
      xbreaks.push_back(c.mean(0));
      ybreaks.push_back(c.mean(1));
    }
  }
  // The inner integrals are only accurate to their own tolerance, so the outer
  // tolerance cannot usefully go below it.
  const double outer_tol = std::max(tol, 1e-9);
  double inner_err = 0.0;
  Vec p(2);
  const auto inner = [&](double x) {
    p(0) = x;
    const auto r = integrate_with_breaks(
        [&](double y) {
          p(1) = y;
          return phi(pdf_at(f, p), pdf_at(g, p));
        },
        ybreaks, outer_tol * 1e-2);
    inner_err = std::max(inner_err, r.error);
    return r.value;
  };
  const auto r = integrate_with_breaks(inner, xbreaks, outer_tol);
  out.value = r.value;
  out.ci_half_width = r.error + inner_err * (hi(0) - lo(0));
  return out;
}

// Stratified estimate of E_h[phi(f, g) / h] with h = (f + g) / 2, using equal
// draws from f and from g.
template <class Phi>
DistanceEstimate monte_carlo_integral(const MixtureParams& f, const MixtureParams& g, const Phi& phi,
                                      const DistanceConfig& cfg) {
  const auto fa = sample(f, cfg.samples, derive_seed(cfg.seed, "lab:distance", 0));
  const auto ga = sample(g, cfg.samples, derive_seed(cfg.seed, "lab:distance", 1));
  double mean[2] = {0, 0}, var[2] = {0, 0};
  int s = 0;
  Vec x(f.dim());
  for (const auto* batch : {&fa, &ga}) {
    double sum = 0.0, sum2 = 0.0, vmax = 0.0;
    for (Eigen::Index i = 0; i < batch->size(); ++i) {
      x = batch->points.row(i).transpose();
      const double a = pdf_at(f, x), b = pdf_at(g, x);
      const double h = 0.5 * (a + b);
      const double v = h > 0.0 ? phi(a, b) / h : 0.0;
      sum += v;
      sum2 += v * v;
      vmax = std::max(vmax, std::abs(v));
    }
    const double n = static_cast<double>(batch->size());
    mean[s] = sum / n;
    // Floor at the variance of one draw out of n deviating by the largest
    // observed value: a region no draw reached (e.g. the overlap of two nearly
    // disjoint densities) otherwise reports zero uncertainty.
    var[s] = std::max(sum2 / n - mean[s] * mean[s], vmax * vmax / n);
    ++s;
  }
  DistanceEstimate out;
  out.monte_carlo = true;
  out.value = 0.5 * (mean[0] + mean[1]);
  out.ci_half_width = 3.0 * 0.5 * std::sqrt((var[0] + var[1]) / static_cast<double>(cfg.samples));
  return out;
}

inline bool use_quadrature(const MixtureParams& f, const DistanceConfig& cfg) {
  if (cfg.method == DistanceMethod::Quadrature) {
    if (f.dim() > 2) throw InvalidInput("quadrature distances support d <= 2");
    return true;
  }
  return cfg.method == DistanceMethod::Auto && f.dim() <= 2;
}

}  // namespace detail

// |f - g|_1
inline DistanceEstimate l1_distance(const MixtureParams& f, const MixtureParams& g, const DistanceConfig& cfg = {}) {
  detail::check_pair(f, g);
  const auto phi = [](double a, double b) { return std::abs(a - b); };
  return detail::use_quadrature(f, cfg) ? detail::quadrature_integral(f, g, phi, cfg.abs_tol)
                                        : detail::monte_carlo_integral(f, g, phi, cfg);
}

inline DistanceEstimate tv_distance(const MixtureParams& f, const MixtureParams& g, const DistanceConfig& cfg = {}) {
  auto e = l1_distance(f, g, cfg);
  e.value *= 0.5;
  e.ci_half_width *= 0.5;
  return e;
}

// |f - g|_2
inline DistanceEstimate l2_distance(const MixtureParams& f, const MixtureParams& g, const DistanceConfig& cfg = {}) {
  detail::check_pair(f, g);
  const auto phi = [](double a, double b) { return (a - b) * (a - b); };
  auto sq = detail::use_quadrature(f, cfg) ? detail::quadrature_integral(f, g, phi, cfg.abs_tol * 1e-3)
                                           : detail::monte_carlo_integral(f, g, phi, cfg);
  DistanceEstimate out = sq;
  out.value = std::sqrt(std::max(0.0, sq.value));
  out.ci_half_width = out.value > 0.0 ? sq.ci_half_width / (2.0 * out.value) : std::sqrt(sq.ci_half_width);
  return out;
}

}  // namespace sgmix
