#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sgmix/core/mixture.hpp"
#include "sgmix/core/rng.hpp"

namespace sgmix {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SampleBatch {
  RowMat points;  // N x d, one draw per row
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> component_labels;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

inline constexpr Eigen::Index kSampleShard = 1 << 16;

inline SampleBatch sample(const MixtureParams& mix, Eigen::Index n, std::uint64_t seed,
                          bool keep_labels = false) {
  if (n < 1) throw InvalidInput("sample count must be at least 1");
  const int d = mix.dim();
  SampleBatch out;
  out.seed = seed;
  out.points.resize(n, d);
  std::vector<int> labels;
  if (keep_labels) labels.resize(static_cast<size_t>(n));

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : mix.components()) cumulative.push_back(acc += c.weight);
  cumulative.back() = 1.0;

  for (Eigen::Index start = 0, shard = 0; start < n; start += kSampleShard, ++shard) {
    Rng rng(derive_seed(seed, "sample:mixture", static_cast<std::uint64_t>(shard)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index stop = std::min(n, start + kSampleShard);
    for (Eigen::Index row = start; row < stop; ++row) {
      const double u = unif(rng);
      const int j = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                     cumulative.begin());
      const int jj = std::min(j, mix.k() - 1);
      const auto& c = mix[jj];
      const double s = std_dev_from_sigma(c.sigma);
      for (int a = 0; a < d; ++a) out.points(row, a) = c.mean(a) + s * normal(rng);
      if (keep_labels) labels[static_cast<size_t>(row)] = jj;
    }
  }
  if (keep_labels) out.component_labels = std::move(labels);
  return out;
}

}  // namespace sgmix
