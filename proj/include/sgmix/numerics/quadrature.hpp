#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace sgmix {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // |Kronrod - Gauss| summed over panels
  int panels = 0;
  bool converged = true;
};

namespace detail {

inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kGkNodes[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kKronrodWeights[i] * s;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

// Adaptive Gauss-Kronrod 7/15 over [a, b]: repeatedly bisects the panel with
// the largest error estimate until the summed estimate meets the tolerance.
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 0.0,
                     int max_panels = 20000) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<detail::Panel> heap;
  const detail::Panel first = detail::gk15(f, a, b);
  heap.push(first);
  double value = first.value, error = first.error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(heap.size()) >= max_panels) {
      out.converged = false;
      break;
    }
    const detail::Panel p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    const detail::Panel l = detail::gk15(f, p.a, mid);
    const detail::Panel r = detail::gk15(f, mid, p.b);
    heap.push(l);
    heap.push(r);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
  }
  // Re-sum from scratch to avoid drift from the running updates.
  out.value = 0.0;
  out.error = 0.0;
  std::vector<detail::Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  out.panels = static_cast<int>(panels.size());
  return out;
}

// Same, with the interval pre-split at the given interior breakpoints.
template <class F>
QuadResult integrate_with_breaks(const F& f, std::vector<double> points, double abs_tol = 1e-12,
                                 double rel_tol = 0.0) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  QuadResult out;
  const double share = abs_tol / std::max<size_t>(1, points.size() - 1);
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const QuadResult r = integrate(f, points[i], points[i + 1], share, rel_tol);
    out.value += r.value;
    out.error += r.error;
    out.panels += r.panels;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace sgmix
