#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "sgmix/core/rng.hpp"
#include "sgmix/lab/moments.hpp"

namespace sgmix {

struct InjectiveNormConfig {
  int starts = 64;
  int max_iterations = 2000;
  double tolerance = 1e-14;
  bool sphere_refinement = true;  // grid + golden-section pass for d <= 3
  std::uint64_t seed = 0x5EED;
};

struct InjectiveNormResult {
  double value = 0.0;  // attained |<T, y^r>|, a lower bound on the norm
  Vec argmax;
  int starts = 0;
  bool exact = false;  // true when the value is known to equal the norm (r = 1 or d = 1)
};

namespace detail {

// Shifted symmetric higher-order power iteration maximizing s <T, y^r> on the
// unit sphere, s = +-1. The shift (r-1)|T|_F makes the ascent monotone.
inline double power_ascent(const SymTensor& t, double sign, Vec y, const InjectiveNormConfig& cfg, Vec* best_y) {
  const double alpha = (t.order() - 1) * t.frobenius_norm();
  y /= y.norm();
  double val = sign * t.contract(y);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    Vec next = sign * t.contract_all_but_one(y) + alpha * y;
    const double n = next.norm();
    if (!(n > 0.0)) break;
    next /= n;
    const double nv = sign * t.contract(next);
    const bool done = std::abs(nv - val) <= cfg.tolerance * std::max(1.0, std::abs(nv));
    y = next;
    val = nv;
    if (done) break;
  }
  *best_y = y;
  return val;
}

inline Vec sphere_point(double theta, double phi, int d) {
  Vec y(d);
  if (d == 2) {
    y << std::cos(theta), std::sin(theta);
  } else {
    y << std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi);
  }
  return y;
}

inline double golden_max(const std::function<double(double)>& f, double a, double b, int iters = 80) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

// Dense angular grid followed by golden-section polishing of |<T, y^r>|.
inline double refine_on_sphere(const SymTensor& t, Vec* best_y) {
  const int d = t.dim();
  const auto absval = [&](double th, double ph) { return std::abs(t.contract(sphere_point(th, ph, d))); };
  const double pi = std::numbers::pi;
  double bt = 0.0, bp = pi / 2.0, bv = -1.0;
  const int nt = d == 2 ? 2048 : 256, np = d == 2 ? 1 : 128;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) {
      const double th = pi * i / nt;  // y and -y give the same |value|
      const double ph = d == 2 ? pi / 2.0 : pi * (j + 0.5) / np;
      const double v = absval(th, ph);
      if (v > bv) bv = v, bt = th, bp = ph;
    }
  }
  double wt = pi / nt, wp = pi / np;
  for (int round = 0; round < (d == 2 ? 1 : 6); ++round) {
    bt = golden_max([&](double th) { return absval(th, bp); }, bt - wt, bt + wt);
    if (d == 3) bp = golden_max([&](double ph) { return absval(bt, ph); }, bp - wp, bp + wp);
    wt *= 0.5;
    wp *= 0.5;
  }
  *best_y = sphere_point(bt, bp, d);
  return absval(bt, bp);
}

}  // namespace detail

// max over unit y of |<T, y^r>|. Exact for r = 1 (vector norm) and d = 1
// (absolute value); otherwise a multistart lower bound. Start i depends only
// on (seed, i), so adding starts can only raise the result.
inline InjectiveNormResult injective_norm(const SymTensor& t, const InjectiveNormConfig& cfg = {}) {
  const int d = t.dim();
  InjectiveNormResult out;
  if (d == 1) {
    out.value = std::abs(t[0]);
    out.argmax = Vec::Ones(1);
    out.exact = true;
    return out;
  }
  if (t.order() == 1) {
    Vec v(d);
    for (int a = 0; a < d; ++a) v(a) = t[static_cast<size_t>(a)];
    out.value = v.norm();
    out.argmax = out.value > 0.0 ? Vec(v / out.value) : Vec(Vec::Unit(d, 0));
    out.exact = true;
    return out;
  }
  out.argmax = Vec::Unit(d, 0);
  out.value = std::abs(t.contract(out.argmax));
  for (int s = 0; s < cfg.starts; ++s) {
    Rng rng(derive_seed(cfg.seed, "lab:injective-start", static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec y0(d);
    for (int a = 0; a < d; ++a) y0(a) = normal(rng);
    for (double sign : {1.0, -1.0}) {
      Vec y;
      const double v = detail::power_ascent(t, sign, y0, cfg, &y);
      if (v > out.value) {
        out.value = v;
        out.argmax = y;
      }
    }
  }
  out.starts = cfg.starts;
  if (cfg.sphere_refinement && d <= 3) {
    Vec y;
    const double v = detail::refine_on_sphere(t, &y);
    if (v > out.value) {
      out.value = v;
      out.argmax = y;
    }
  }
  return out;
}

}  // namespace sgmix
