#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sgmix/core/mixture.hpp"

namespace sgmix {

enum class SeparationRegime { Dimension, LogK };

struct PairSeparation {
  int i = 0, j = 0;
  double lhs = 0.0;             // |mu_i - mu_j|
  double rhs = 0.0;             // c (sigma_i + sigma_j) min{regime terms}
  double dimension_term = 0.0;  // sqrt(d) + sqrt(log(rho_w rho_sigma))
  double log_k_term = 0.0;      // sqrt(log(rho_sigma / w_min))
  SeparationRegime binding = SeparationRegime::Dimension;
  bool pass = false;
};

struct SeparationReport {
  double c = 0.0;
  std::vector<PairSeparation> pairs;
  bool all_pass() const {
    for (const auto& p : pairs)
      if (!p.pass) return false;
    return true;
  }
  // Largest multiplier c for which every pair passes.
  double max_passing_multiplier() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pairs) {
      const double unit = p.rhs / c;
      best = std::min(best, unit > 0 ? p.lhs / unit : std::numeric_limits<double>::infinity());
    }
    return best;
  }
};

inline double separation_scale(int d, const DerivedStats& s, SeparationRegime* binding = nullptr) {
  const double dim_term = std::sqrt(static_cast<double>(d)) + std::sqrt(std::log(s.rho_w * s.rho_sigma));
  const double logk_term = std::sqrt(std::log(s.rho_sigma / s.w_min));
  if (binding) *binding = dim_term <= logk_term ? SeparationRegime::Dimension : SeparationRegime::LogK;
  return std::min(dim_term, logk_term);
}

inline SeparationReport separation_audit(const std::vector<Vec>& means, const std::vector<double>& sigmas,
                                         const DerivedStats& stats, double c) {
  if (means.size() < 2) throw InvalidInput("separation_audit needs k >= 2");
  SeparationReport rep;
  rep.c = c;
  const int d = static_cast<int>(means.front().size());
  const double dim_term = std::sqrt(static_cast<double>(d)) + std::sqrt(std::log(stats.rho_w * stats.rho_sigma));
  const double logk_term = std::sqrt(std::log(stats.rho_sigma / stats.w_min));
  for (size_t i = 0; i < means.size(); ++i) {
    for (size_t j = i + 1; j < means.size(); ++j) {
      PairSeparation p;
      p.i = static_cast<int>(i);
      p.j = static_cast<int>(j);
      p.lhs = (means[i] - means[j]).norm();
      p.dimension_term = dim_term;
      p.log_k_term = logk_term;
      p.binding = dim_term <= logk_term ? SeparationRegime::Dimension : SeparationRegime::LogK;
      p.rhs = c * (sigmas[i] + sigmas[j]) * std::min(dim_term, logk_term);
      p.pass = p.lhs >= p.rhs;
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

inline SeparationReport separation_audit(const MixtureParams& mix, double c) {
  return separation_audit(mix.means(), mix.sigmas(), mix.stats(), c);
}

}  // namespace sgmix
