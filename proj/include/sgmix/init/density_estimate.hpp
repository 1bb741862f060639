#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "sgmix/core/density.hpp"
#include "sgmix/core/sampling.hpp"

namespace sgmix {

struct DensityEstimate {
  double f = 0.0;      // second-order corrected density
  double f_raw = 0.0;  // in-ball count fraction / ball volume
  Vec grad;
  Mat hess;
  double f_se = 0.0;
  double grad_se = 0.0;  // per coordinate
  double hess_se = 0.0;  // per entry
};

inline double ball_volume(int d, double h) {
  const double dd = static_cast<double>(d);
  return std::pow(std::numbers::pi, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0) * std::pow(h, dd);
}

// Samples bucketed into cubic cells of side h for ball queries of radius h.
class CellIndex {
 public:
  CellIndex(const RowMat& points, double h) : points_(points), h_(h), d_(static_cast<int>(points.cols())) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) cells_[key(cell_of(points.row(i).data()))].push_back(i);
  }

  // Calls fn(row pointer) for every sample within distance h of y.
  template <class Fn>
  void for_each_in_ball(const double* y, const Fn& fn) const {
    const std::vector<long> base = cell_of(y);
    std::vector<long> cur(static_cast<size_t>(d_));
    std::vector<int> off(static_cast<size_t>(d_), -1);
    const double h2 = h_ * h_;
    while (true) {
      for (int a = 0; a < d_; ++a) cur[a] = base[a] + off[a];
      const auto it = cells_.find(key(cur));
      if (it != cells_.end()) {
        for (Eigen::Index i : it->second) {
          const double* x = points_.row(i).data();
          double r2 = 0.0;
          for (int a = 0; a < d_; ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
          if (r2 <= h2) fn(x);
        }
      }
      int a = d_ - 1;
      while (a >= 0 && off[a] == 1) off[a--] = -1;
      if (a < 0) break;
      ++off[a];
    }
  }

 private:
  std::vector<long> cell_of(const double* x) const {
    std::vector<long> c(static_cast<size_t>(d_));
    for (int a = 0; a < d_; ++a) c[a] = static_cast<long>(std::floor(x[a] / h_));
    return c;
  }
  static std::uint64_t key(const std::vector<long>& c) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (long v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001B3ULL;
    }
    return h;
  }

  const RowMat& points_;
  double h_;
  int d_;
  std::unordered_map<std::uint64_t, std::vector<Eigen::Index>> cells_;
};

// Local-moment estimates in the ball of radius h around y. With u = x - y,
// m0 = P(ball), m1 = E[u 1], S = E[u u^T 1] and a second-order Taylor model of
// f, the ball integrals give
//   grad = (d+2) m1 / (V h^2),
//   S'   = S - h^2/(d+2) m0 I,
//   tr H = (d+2)^2 (d+4) tr S' / (2 V h^4),
//   H    = (d+2)(d+4) S' / (V h^4) + tr H / (d+2) I,
//   f    = m0 / V - h^2 tr H / (2 (d+2)).
inline DensityEstimate moments_to_estimate(int d, double h, double n, double count, const Vec& sum1, const Mat& sum2,
                                           double sum_r4) {
  const double dd = static_cast<double>(d);
  const double vol = ball_volume(d, h);
  const double h2 = h * h, h4 = h2 * h2;
  DensityEstimate e;
  const double m0 = count / n;
  const Vec m1 = sum1 / n;
  const Mat s = sum2 / n;
  const Mat sp = s - (h2 / (dd + 2.0)) * m0 * Mat::Identity(d, d);
  const double tr_h = (dd + 2.0) * (dd + 2.0) * (dd + 4.0) * sp.trace() / (2.0 * vol * h4);
  e.hess = (dd + 2.0) * (dd + 4.0) / (vol * h4) * sp + tr_h / (dd + 2.0) * Mat::Identity(d, d);
  e.grad = (dd + 2.0) / (vol * h2) * m1;
  e.f_raw = m0 / vol;
  e.f = e.f_raw - h2 * tr_h / (2.0 * (dd + 2.0));
  if (count == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    e.f_se = e.grad_se = e.hess_se = inf;
    return e;
  }
  // f is the sample mean of psi(u) / V with psi = 1 + d(d+4)/4 - (d+2)(d+4)|u|^2 / (4 h^2) on the ball.
  const double c = 1.0 + dd * (dd + 4.0) / 4.0, a = (dd + 2.0) * (dd + 4.0) / (4.0 * h2);
  const double mean_r2 = s.trace(), mean_r4 = sum_r4 / n;
  const double psi_mean = c * m0 - a * mean_r2;
  const double psi_sq = c * c * m0 - 2.0 * c * a * mean_r2 + a * a * mean_r4;
  e.f_se = std::sqrt(std::max(0.0, psi_sq - psi_mean * psi_mean) / n) / vol;
  double max_second = 0.0;
  for (int a = 0; a < d; ++a) max_second = std::max(max_second, s(a, a));
  e.grad_se = (dd + 2.0) / (vol * h2) * std::sqrt(max_second / n);
  e.hess_se = (dd + 2.0) * (dd + 4.0) / (vol * h4) * std::sqrt(sum_r4 / n / n);
  return e;
}

// Exact values from the mixture (the noiseless test configuration).
inline std::vector<DensityEstimate> exact_density_derivatives(const MixtureParams& mix, const RowMat& points) {
  std::vector<DensityEstimate> out;
  out.reserve(static_cast<size_t>(points.rows()));
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    const Vec y = points.row(p).transpose();
    DensityEstimate e;
    e.f = e.f_raw = pdf_at(mix, y);
    e.grad = grad_pdf_at(mix, y);
    e.hess = hess_pdf_at(mix, y);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace sgmix

namespace sgmix {

// Point-query interface shared by the sampled and exact initializer paths.
using DensityOracle = std::function<std::vector<DensityEstimate>(const RowMat&)>;

class SampleDensityOracle {
 public:
  SampleDensityOracle(const SampleBatch& samples, double ball_radius)
      : samples_(samples), h_(ball_radius), index_(samples.points, ball_radius) {
    if (!(ball_radius > 0.0)) throw InvalidInput("SampleDensityOracle: ball radius must be positive");
  }

  std::vector<DensityEstimate> operator()(const RowMat& points) const {
    if (points.cols() != samples_.dim()) throw InvalidInput("density oracle: dimension mismatch");
    const int d = samples_.dim();
    const double n = static_cast<double>(samples_.size());
    std::vector<DensityEstimate> out;
    out.reserve(static_cast<size_t>(points.rows()));
    Vec sum1(d), u(d);
    Mat sum2(d, d);
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
      const double* y = points.row(p).data();
      double count = 0.0, r4 = 0.0;
      sum1.setZero();
      sum2.setZero();
      index_.for_each_in_ball(y, [&](const double* x) {
        for (int a = 0; a < d; ++a) u(a) = x[a] - y[a];
        const double r2 = u.squaredNorm();
        count += 1.0;
        sum1 += u;
        sum2.noalias() += u * u.transpose();
        r4 += r2 * r2;
      });
      out.push_back(moments_to_estimate(d, h_, n, count, sum1, sum2, r4));
    }
    return out;
  }

  double ball_radius() const { return h_; }

 private:
  const SampleBatch& samples_;
  double h_;
  CellIndex index_;
};

inline DensityOracle exact_oracle(const MixtureParams& mix) {
  return [mix](const RowMat& points) { return exact_density_derivatives(mix, points); };
}

}  // namespace sgmix

namespace sgmix {

inline std::vector<DensityEstimate> estimate_density_derivatives(const SampleBatch& samples, const RowMat& points,
                                                                 double ball_radius) {
  if (!(ball_radius > 0.0)) throw InvalidInput("estimate_density_derivatives: ball radius must be positive");
  return SampleDensityOracle(samples, ball_radius)(points);
}

}  // namespace sgmix
