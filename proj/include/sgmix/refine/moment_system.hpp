#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sgmix/core/mixture.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/numerics/newton.hpp"
#include "sgmix/numerics/quadrature.hpp"
#include "sgmix/refine/region.hpp"

namespace sgmix {

struct MonteCarloConfig {
  Eigen::Index samples_per_component = 200000;
  std::uint64_t seed = 0;
  bool antithetic = true;
};

// The moment map F and its Jacobian for fixed regions S_j and known (w, sigma).
// Unknowns are offsets delta from the anchors in normalized units, so
// component i sits at z_i + sigma_i delta_i. All integrals are taken in
// coordinates relative to the anchor of the region they live on.
class MomentSystem {
 public:
  MomentSystem(std::vector<Region> regions, KnownParams known)
      : regions_(std::move(regions)), known_(std::move(known)) {
    if (regions_.empty() || known_.k() != static_cast<int>(regions_.size())) {
      throw InvalidInput("MomentSystem: regions and known parameters disagree");
    }
    k_ = static_cast<int>(regions_.size());
    d_ = regions_.front().dim();
  }

  int k() const { return k_; }
  int dim() const { return d_; }
  int size() const { return k_ * d_; }
  const std::vector<Region>& regions() const { return regions_; }
  const KnownParams& known() const { return known_; }

  // Normalized means x with x_j = mu_j / sigma_j, from offsets, and back.
  Vec to_normalized(const Vec& delta) const {
    Vec x(size());
    for (int j = 0; j < k_; ++j)
      x.segment(j * d_, d_) = regions_[j].anchor / known_.sigmas[j] + delta.segment(j * d_, d_);
    return x;
  }
  Vec to_offsets(const Vec& x) const {
    Vec delta(size());
    for (int j = 0; j < k_; ++j)
      delta.segment(j * d_, d_) = x.segment(j * d_, d_) - regions_[j].anchor / known_.sigmas[j];
    return delta;
  }
  std::vector<Vec> means_from_offsets(const Vec& delta) const {
    std::vector<Vec> out;
    for (int j = 0; j < k_; ++j) out.push_back(regions_[j].anchor + known_.sigmas[j] * delta.segment(j * d_, d_));
    return out;
  }

  // Center of component i relative to anchor j.
  Vec offset(const Vec& delta, int i, int j) const {
    return (regions_[i].anchor - regions_[j].anchor) + known_.sigmas[i] * delta.segment(i * d_, d_);
  }

  // ---- one-dimensional quadrature ----

  VectorEstimate F_quadrature(const Vec& delta) const {
    return F_quadrature_impl([&](int i, int j) { return offset(delta, i, j)(0); });
  }
  // F at explicit means (used for the exact target b = F(x*)).
  VectorEstimate F_quadrature_at_means(const std::vector<Vec>& means) const {
    return F_quadrature_impl([&](int i, int j) { return means[i](0) - regions_[j].anchor(0); });
  }

  MatrixEstimate Fprime_quadrature(const Vec& delta) const {
    require_1d();
    MatrixEstimate out;
    out.value = Mat::Zero(k_, k_);
    for (int j = 0; j < k_; ++j) {
      const double a = regions_[j].half_length_1d();
      double row_error = 0.0;
      for (int i = 0; i < k_; ++i) {
        const double o = offset(delta, i, j)(0), s = known_.sigmas[i];
        const auto q = window_integral([&](double u) { return u * (u - o) * density_1d(u - o, s); }, -a, a, o, s);
        const double scale = 2.0 * std::numbers::pi * known_.weights[i] / (known_.weights[j] * known_.sigmas[j] * s);
        out.value(j, i) = scale * q.value;
        row_error += scale * q.error;
      }
      out.tolerance = std::max(out.tolerance, row_error);
    }
    return out;
  }

  // max_j sum_i |d^2 F_j / d x_i^2|: the inf-norm of the second derivative in
  // one dimension (mixed partials vanish).
  double Fsecond_norm_quadrature(const Vec& delta) const {
    require_1d();
    const double two_pi = 2.0 * std::numbers::pi;
    double worst = 0.0;
    for (int j = 0; j < k_; ++j) {
      const double a = regions_[j].half_length_1d();
      double row = 0.0;
      for (int i = 0; i < k_; ++i) {
        const double o = offset(delta, i, j)(0), s = known_.sigmas[i];
        const auto q = window_integral(
            [&](double u) {
              const double v = u - o;
              return u * two_pi * (two_pi * v * v / (s * s) - 1.0) * density_1d(v, s);
            },
            -a, a, o, s);
        row += std::abs(known_.weights[i] / (known_.weights[j] * known_.sigmas[j]) * q.value);
      }
      worst = std::max(worst, row);
    }
    return worst;
  }

  // ---- Monte Carlo (any dimension) ----

  VectorEstimate F_monte_carlo(const Vec& delta, const MonteCarloConfig& mc, std::uint64_t stream) const {
    const int n = size();
    Vec mean = Vec::Zero(n), var = Vec::Zero(n);
    std::vector<Vec> offs(k_);
    std::vector<double> acc(static_cast<size_t>(k_ * d_)), acc2(static_cast<size_t>(k_ * d_));
    std::vector<double> u(d_), v(d_), c(d_), xi(d_);
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) offs[j] = offset(delta, i, j);
      std::fill(acc.begin(), acc.end(), 0.0);
      std::fill(acc2.begin(), acc2.end(), 0.0);
      const double s = std_dev_from_sigma(known_.sigmas[i]);
      Rng rng(derive_seed(mc.seed, "refine:F", stream, static_cast<std::uint64_t>(i)));
      std::normal_distribution<double> normal(0.0, 1.0);
      const Eigen::Index draws = mc.antithetic ? std::max<Eigen::Index>(1, mc.samples_per_component / 2)
                                               : mc.samples_per_component;
      for (Eigen::Index t = 0; t < draws; ++t) {
        for (int a = 0; a < d_; ++a) xi[a] = s * normal(rng);
        for (int j = 0; j < k_; ++j) {
          const double* o = offs[j].data();
          for (int a = 0; a < d_; ++a) u[a] = o[a] + xi[a];
          const bool in_u = regions_[j].contains_offset(u.data());
          if (mc.antithetic) {
            for (int a = 0; a < d_; ++a) v[a] = o[a] - xi[a];
            const bool in_v = regions_[j].contains_offset(v.data());
            if (!in_u && !in_v) continue;
            for (int a = 0; a < d_; ++a) c[a] = 0.5 * ((in_u ? u[a] : 0.0) + (in_v ? v[a] : 0.0));
          } else {
            if (!in_u) continue;
            for (int a = 0; a < d_; ++a) c[a] = u[a];
          }
          for (int a = 0; a < d_; ++a) {
            acc[j * d_ + a] += c[a];
            acc2[j * d_ + a] += c[a] * c[a];
          }
        }
      }
      const double m = static_cast<double>(draws);
      for (int j = 0; j < k_; ++j) {
        const double scale = known_.weights[i] / (known_.weights[j] * known_.sigmas[j]);
        for (int a = 0; a < d_; ++a) {
          const double mu = acc[j * d_ + a] / m;
          const double var_single = std::max(0.0, acc2[j * d_ + a] / m - mu * mu);
          // One-event resolution floor: rare boundary crossings can go unseen.
          const double floor = s / m;
          mean(j * d_ + a) += scale * mu;
          var(j * d_ + a) += scale * scale * (var_single / m + floor * floor);
        }
      }
    }
    VectorEstimate out;
    out.value = mean;
    out.standard_error = var.cwiseSqrt();
    out.tolerance = 3.0 * out.standard_error.maxCoeff();
    return out;
  }

  MatrixEstimate Fprime_monte_carlo(const Vec& delta, const MonteCarloConfig& mc, std::uint64_t stream) const {
    const int n = size();
    Mat mean = Mat::Zero(n, n), var = Mat::Zero(n, n);
    std::vector<Vec> offs(k_);
    const size_t block = static_cast<size_t>(d_ * d_);
    std::vector<double> acc(block * k_), acc2(block * k_);
    std::vector<double> u(d_), v(d_), xi(d_), c(block);
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) offs[j] = offset(delta, i, j);
      std::fill(acc.begin(), acc.end(), 0.0);
      std::fill(acc2.begin(), acc2.end(), 0.0);
      const double s = std_dev_from_sigma(known_.sigmas[i]);
      Rng rng(derive_seed(mc.seed, "refine:J", stream, static_cast<std::uint64_t>(i)));
      std::normal_distribution<double> normal(0.0, 1.0);
      const Eigen::Index draws = mc.antithetic ? std::max<Eigen::Index>(1, mc.samples_per_component / 2)
                                               : mc.samples_per_component;
      for (Eigen::Index t = 0; t < draws; ++t) {
        for (int a = 0; a < d_; ++a) xi[a] = s * normal(rng);
        for (int j = 0; j < k_; ++j) {
          const double* o = offs[j].data();
          for (int a = 0; a < d_; ++a) u[a] = o[a] + xi[a];
          const bool in_u = regions_[j].contains_offset(u.data());
          bool in_v = false;
          if (mc.antithetic) {
            for (int a = 0; a < d_; ++a) v[a] = o[a] - xi[a];
            in_v = regions_[j].contains_offset(v.data());
          }
          if (!in_u && !in_v) continue;
          // integrand (y - z_j)(y - sigma_i x_i)^T = u xi^T, and v (-xi)^T for the mirror
          const double half = mc.antithetic ? 0.5 : 1.0;
          for (int a = 0; a < d_; ++a) {
            const double left = (in_u ? u[a] : 0.0) - (in_v ? v[a] : 0.0);
            for (int b = 0; b < d_; ++b) c[a * d_ + b] = half * left * xi[b];
          }
          double* dst = &acc[block * j];
          double* dst2 = &acc2[block * j];
          for (size_t e = 0; e < block; ++e) {
            dst[e] += c[e];
            dst2[e] += c[e] * c[e];
          }
        }
      }
      const double m = static_cast<double>(draws);
      for (int j = 0; j < k_; ++j) {
        const double scale = 2.0 * std::numbers::pi * known_.weights[i] /
                             (known_.weights[j] * known_.sigmas[j] * known_.sigmas[i]);
        for (int a = 0; a < d_; ++a) {
          for (int b = 0; b < d_; ++b) {
            const size_t e = block * j + static_cast<size_t>(a * d_ + b);
            const double mu = acc[e] / m;
            const double var_single = std::max(0.0, acc2[e] / m - mu * mu);
            const double floor = s * s / m;
            mean(j * d_ + a, i * d_ + b) = scale * mu;
            var(j * d_ + a, i * d_ + b) = scale * scale * (var_single / m + floor * floor);
          }
        }
      }
    }
    MatrixEstimate out;
    out.value = mean;
    out.standard_error = var.cwiseSqrt();
    out.tolerance = 3.0 * out.standard_error.rowwise().sum().maxCoeff();
    return out;
  }

 private:
  static double density_1d(double v, double sigma) {
    return std::exp(-std::numbers::pi * v * v / (sigma * sigma)) / sigma;
  }

  void require_1d() const {
    if (d_ != 1) throw InvalidInput("quadrature oracle is only available in one dimension");
  }

  // Integral over [lo, hi] of an integrand carrying a Gaussian factor centered
  // at `center` with scale parameter sigma; the window is clipped to +-40
  // standard deviations where the factor is below double precision.
  template <class Fn>
  static QuadResult window_integral(const Fn& fn, double lo, double hi, double center, double sigma) {
    const double s = std_dev_from_sigma(sigma);
    const double a = std::max(lo, center - 40.0 * s), b = std::min(hi, center + 40.0 * s);
    if (!(a < b)) return {};
    std::vector<double> pts{a, b};
    for (double m : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
      const double p = center + m * s;
      if (p > a && p < b) pts.push_back(p);
    }
    return integrate_with_breaks(fn, pts, 1e-13);
  }

  template <class OffsetFn>
  VectorEstimate F_quadrature_impl(const OffsetFn& off) const {
    require_1d();
    VectorEstimate out;
    out.value = Vec::Zero(k_);
    for (int j = 0; j < k_; ++j) {
      const double a = regions_[j].half_length_1d();
      double row_error = 0.0;
      for (int i = 0; i < k_; ++i) {
        const double o = off(i, j), s = known_.sigmas[i];
        const auto q = window_integral([&](double u) { return u * density_1d(u - o, s); }, -a, a, o, s);
        const double scale = known_.weights[i] / (known_.weights[j] * known_.sigmas[j]);
        out.value(j) += scale * q.value;
        row_error += scale * q.error;
      }
      out.tolerance = std::max(out.tolerance, row_error);
    }
    return out;
  }

  std::vector<Region> regions_;
  KnownParams known_;
  int k_ = 0, d_ = 0;
};

struct EvalConfig {
  bool exact_quadrature = false;
  MonteCarloConfig mc;
  std::uint64_t stream = 0;  // distinct streams give independent Monte Carlo draws
};

// F at normalized means x (x_j = mu_j / sigma_j) for regions anchored at the initializers.
inline VectorEstimate eval_F(const Vec& x, const std::vector<Region>& regions, const KnownParams& known,
                             const EvalConfig& cfg) {
  const MomentSystem sys(regions, known);
  if (x.size() != sys.size()) throw InvalidInput("eval_F: argument has the wrong length");
  const Vec delta = sys.to_offsets(x);
  return cfg.exact_quadrature ? sys.F_quadrature(delta) : sys.F_monte_carlo(delta, cfg.mc, cfg.stream);
}

inline MatrixEstimate eval_Fprime(const Vec& x, const std::vector<Region>& regions, const KnownParams& known,
                                  const EvalConfig& cfg) {
  const MomentSystem sys(regions, known);
  if (x.size() != sys.size()) throw InvalidInput("eval_Fprime: argument has the wrong length");
  const Vec delta = sys.to_offsets(x);
  return cfg.exact_quadrature ? sys.Fprime_quadrature(delta) : sys.Fprime_monte_carlo(delta, cfg.mc, cfg.stream);
}

// Per block row j: the largest row sum of |M_jj - I| and of the off-diagonal
// blocks' absolute entries.
struct DominanceDiagnostics {
  double max_diagonal_deviation = 0.0;
  double max_offdiagonal_mass = 0.0;
};

inline DominanceDiagnostics dominance_diagnostics(const Mat& jac, int k, int d) {
  DominanceDiagnostics out;
  for (int j = 0; j < k; ++j) {
    for (int r = 0; r < d; ++r) {
      const int row = j * d + r;
      double diag = 0.0, off = 0.0;
      for (int i = 0; i < k; ++i) {
        for (int c = 0; c < d; ++c) {
          const double v = jac(row, i * d + c);
          if (i == j) diag += std::abs(v - (r == c ? 1.0 : 0.0));
          else off += std::abs(v);
        }
      }
      out.max_diagonal_deviation = std::max(out.max_diagonal_deviation, diag);
      out.max_offdiagonal_mass = std::max(out.max_offdiagonal_mass, off);
    }
  }
  return out;
}

}  // namespace sgmix
