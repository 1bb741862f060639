#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgmix/core/errors.hpp"

namespace sgmix {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Density convention: g(x) = sigma^{-d} exp(-pi |x - mu|^2 / sigma^2), so the
// per-coordinate standard deviation is sigma / sqrt(2 pi).
struct Component {
  double weight = 1.0;
  Vec mean;
  double sigma = 1.0;
};

inline double std_dev_from_sigma(double sigma) { return sigma / std::sqrt(2.0 * std::numbers::pi); }
inline double sigma_from_std_dev(double s) { return s * std::sqrt(2.0 * std::numbers::pi); }

struct DerivedStats {
  double w_min = 0, w_max = 0;
  double sigma_min = 0, sigma_max = 0;
  double rho = 1;        // smallest rho >= 1 for which the mixture is rho-bounded
  double rho_sigma = 1;  // sigma_max / sigma_min
  double rho_w = 1;      // w_max / w_min

  bool is_bounded_by(double r, const std::vector<Component>& comps) const {
    for (const auto& c : comps) {
      if (c.mean.norm() > r || c.sigma < 1.0 / r || c.sigma > r) return false;
    }
    return true;
  }
};

inline DerivedStats stats_from(const std::vector<double>& weights, const std::vector<double>& sigmas,
                               double max_mean_norm = 0.0) {
  if (weights.empty() || weights.size() != sigmas.size()) {
    throw InvalidInput("stats_from: need matching non-empty weight and sigma lists");
  }
  DerivedStats s;
  s.w_min = *std::min_element(weights.begin(), weights.end());
  s.w_max = *std::max_element(weights.begin(), weights.end());
  s.sigma_min = *std::min_element(sigmas.begin(), sigmas.end());
  s.sigma_max = *std::max_element(sigmas.begin(), sigmas.end());
  s.rho_sigma = s.sigma_max / s.sigma_min;
  s.rho_w = s.w_max / s.w_min;
  s.rho = std::max({1.0, max_mean_norm, s.sigma_max, 1.0 / s.sigma_min});
  return s;
}

class MixtureParams {
 public:
  MixtureParams() = default;

  explicit MixtureParams(std::vector<Component> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw InvalidInput("mixture needs at least one component");
    dim_ = static_cast<int>(comps_.front().mean.size());
    if (dim_ < 1) throw InvalidInput("mixture dimension must be positive");
    double total = 0.0;
    for (const auto& c : comps_) {
      if (c.mean.size() != dim_) throw InvalidInput("components disagree on dimension");
      if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw InvalidInput("sigma must be positive and finite");
      if (!(c.weight > 0.0) || c.weight > 1.0 + 1e-9) throw InvalidInput("weight must lie in (0, 1]");
      if (!c.mean.allFinite()) throw InvalidInput("mean must be finite");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw InvalidInput("weights sum to " + std::to_string(total) + ", expected 1");
    }
    if (std::abs(total - 1.0) > 1e-15) {
      for (auto& c : comps_) c.weight /= total;
    }
  }

  // Uniform weights, sigma = 1.
  static MixtureParams standard(const std::vector<Vec>& means) {
    std::vector<Component> comps;
    const double w = 1.0 / static_cast<double>(means.size());
    for (const auto& m : means) comps.push_back({w, m, 1.0});
    return MixtureParams(std::move(comps));
  }

  int k() const { return static_cast<int>(comps_.size()); }
  int dim() const { return dim_; }
  const Component& operator[](int j) const { return comps_[static_cast<size_t>(j)]; }
  const std::vector<Component>& components() const { return comps_; }

  std::vector<double> weights() const {
    std::vector<double> w;
    for (const auto& c : comps_) w.push_back(c.weight);
    return w;
  }
  std::vector<double> sigmas() const {
    std::vector<double> s;
    for (const auto& c : comps_) s.push_back(c.sigma);
    return s;
  }
  std::vector<Vec> means() const {
    std::vector<Vec> m;
    for (const auto& c : comps_) m.push_back(c.mean);
    return m;
  }

  DerivedStats stats() const {
    double max_norm = 0.0;
    for (const auto& c : comps_) max_norm = std::max(max_norm, c.mean.norm());
    return stats_from(weights(), sigmas(), max_norm);
  }

 private:
  std::vector<Component> comps_;
  int dim_ = 0;
};

}  // namespace sgmix
