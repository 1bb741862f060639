#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sgmix/core/mixture.hpp"
#include "sgmix/init/density_estimate.hpp"

namespace sgmix {

struct ApproxMaxThresholds {
  double min_density = 0.0;      // (i)  f >= w_min / (2 sigma_max^d)
  double gradient_ratio = 0.0;   // (ii) |f'| <= gradient_ratio * f
  double curvature_ratio = 0.0;  // (iii) lambda_max(f'') <= -curvature_ratio * f

  static ApproxMaxThresholds from(const DerivedStats& s, int d, double eps0) {
    const double pi = std::numbers::pi;
    ApproxMaxThresholds t;
    t.min_density = s.w_min / (2.0 * std::pow(s.sigma_max, d));
    t.gradient_ratio = pi * eps0 * std::sqrt(static_cast<double>(d)) * s.sigma_min / (4.0 * s.sigma_max * s.sigma_max);
    t.curvature_ratio = pi / (2.0 * s.sigma_max * s.sigma_max);
    return t;
  }
};

struct LocalMaxCandidate {
  Vec point;
  double f = 0.0;
  double grad_norm = 0.0;
  double hess_max = 0.0;
  std::array<bool, 3> passes{false, false, false};

  bool accepted() const { return passes[0] && passes[1] && passes[2]; }
};

inline double max_eigenvalue(const Mat& h) {
  if (h.rows() == 1) return h(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline LocalMaxCandidate classify_point(const Vec& point, const DensityEstimate& e, const ApproxMaxThresholds& t) {
  LocalMaxCandidate c;
  c.point = point;
  c.f = std::max(0.0, e.f);
  c.grad_norm = e.grad.norm();
  c.hess_max = max_eigenvalue(e.hess);
  c.passes[0] = c.f >= t.min_density;
  c.passes[1] = c.grad_norm <= t.gradient_ratio * c.f;
  c.passes[2] = c.hess_max <= -t.curvature_ratio * c.f;
  return c;
}

struct MaximaScan {
  std::vector<LocalMaxCandidate> accepted;
  std::array<long, 3> pass_counts{0, 0, 0};
  long scanned = 0;
  std::vector<std::string> warnings;
};

// Keeps the net points passing all three conditions. Warns when the attached
// tolerances are larger than the gaps they would have to resolve at the peak.
inline MaximaScan find_approx_maxima(const RowMat& points, const std::vector<DensityEstimate>& estimates,
                                     const DerivedStats& stats, double eps0) {
  if (static_cast<size_t>(points.rows()) != estimates.size()) {
    throw InvalidInput("find_approx_maxima: points and estimates differ in length");
  }
  const int d = static_cast<int>(points.cols());
  const auto t = ApproxMaxThresholds::from(stats, d, eps0);
  MaximaScan scan;
  double worst_grad_gap = 0.0, worst_f_gap = 0.0;
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    const auto& e = estimates[static_cast<size_t>(p)];
    auto c = classify_point(points.row(p).transpose(), e, t);
    ++scan.scanned;
    for (int i = 0; i < 3; ++i) scan.pass_counts[i] += c.passes[i] ? 1 : 0;
    if (c.accepted()) {
      if (std::isfinite(e.grad_se)) worst_grad_gap = std::max(worst_grad_gap, e.grad_se / (t.gradient_ratio * c.f));
      if (std::isfinite(e.f_se)) worst_f_gap = std::max(worst_f_gap, e.f_se / c.f);
      scan.accepted.push_back(std::move(c));
    }
  }
  if (worst_grad_gap > 1.0 / 3.0) {
    scan.warnings.push_back("gradient tolerance reaches " + std::to_string(worst_grad_gap) +
                            " of the condition (ii) gap at an accepted point");
  }
  if (worst_f_gap > 0.1) {
    scan.warnings.push_back("density tolerance reaches " + std::to_string(worst_f_gap) + " of f at an accepted point");
  }
  return scan;
}

}  // namespace sgmix
