#pragma once

#include <limits>
#include <vector>

#include "sgmix/core/sampling.hpp"
#include "sgmix/numerics/newton.hpp"
#include "sgmix/refine/region.hpp"

namespace sgmix {

struct BEstimate {
  VectorEstimate estimate;                   // k*d entries; tolerance is 3 * max standard error
  std::vector<double> component_tolerance;   // 3 * max standard error within each component
  std::vector<Eigen::Index> hits;            // samples falling in each region
  std::vector<int> empty_components;
};

// b_j = (1 / (w_j sigma_j N)) sum_l 1[y_l in S_j] (y_l - z_j).
inline BEstimate estimate_b(const SampleBatch& samples, const std::vector<Region>& regions, const KnownParams& known) {
  const int k = static_cast<int>(regions.size());
  if (k == 0 || known.k() != k) throw InvalidInput("estimate_b: regions and known parameters disagree");
  const int d = regions.front().dim();
  if (samples.dim() != d) throw InvalidInput("estimate_b: sample dimension mismatch");
  const Eigen::Index n = samples.size();

  std::vector<double> sum(static_cast<size_t>(k * d), 0.0), sum2(static_cast<size_t>(k * d), 0.0);
  BEstimate out;
  out.hits.assign(static_cast<size_t>(k), 0);
  std::vector<double> u(static_cast<size_t>(d));
  for (Eigen::Index row = 0; row < n; ++row) {
    const double* y = samples.points.row(row).data();
    for (int j = 0; j < k; ++j) {
      const Vec& z = regions[j].anchor;
      for (int a = 0; a < d; ++a) u[a] = y[a] - z(a);
      if (!regions[j].contains_offset(u.data())) continue;
      ++out.hits[j];
      for (int a = 0; a < d; ++a) {
        sum[j * d + a] += u[a];
        sum2[j * d + a] += u[a] * u[a];
      }
    }
  }

  const double nn = static_cast<double>(n);
  out.estimate.value = Vec::Zero(k * d);
  out.estimate.standard_error = Vec::Zero(k * d);
  out.component_tolerance.assign(static_cast<size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    if (out.hits[j] == 0) {
      out.empty_components.push_back(j);
      out.component_tolerance[j] = std::numeric_limits<double>::infinity();
      out.estimate.standard_error.segment(j * d, d).setConstant(std::numeric_limits<double>::infinity());
      continue;
    }
    const double scale = 1.0 / (known.weights[j] * known.sigmas[j]);
    for (int a = 0; a < d; ++a) {
      const double m = sum[j * d + a] / nn;
      const double var = std::max(0.0, sum2[j * d + a] / nn - m * m);
      out.estimate.value(j * d + a) = scale * m;
      out.estimate.standard_error(j * d + a) = scale * std::sqrt(var / nn);
    }
    out.component_tolerance[j] = 3.0 * out.estimate.standard_error.segment(j * d, d).maxCoeff();
  }
  out.estimate.tolerance = *std::max_element(out.component_tolerance.begin(), out.component_tolerance.end());
  return out;
}

}  // namespace sgmix
