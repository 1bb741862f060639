#pragma once

#include <fstream>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgmix/core/errors.hpp"
#include "sgmix/core/sampling.hpp"

namespace sgmix {

struct ProjectionReport {
  Mat basis;                // d x k' with orthonormal columns (k' = min(k, d))
  RowMat projected_samples; // N x k'
  // Orthogonal projections of caller-supplied means, in the original coordinates.
  std::optional<std::vector<Vec>> projected_means_hint;
  std::vector<double> singular_values;  // of the d x N sample matrix, descending, length min(d, N)

  int reduced_dim() const { return static_cast<int>(basis.cols()); }
};

inline Vec project(const ProjectionReport& rep, const Vec& x) {
  if (x.size() != rep.basis.rows()) throw InvalidInput("project: dimension mismatch");
  return rep.basis.transpose() * x;
}

inline Vec lift(const ProjectionReport& rep, const Vec& y) {
  if (y.size() != rep.basis.cols()) throw InvalidInput("lift: dimension mismatch");
  return rep.basis * y;
}

// Uncentered second moment X X^T / N, accumulated in fixed-size shards so the
// summation order does not depend on N's factorization.
inline Mat second_moment(const RowMat& points) {
  const Eigen::Index n = points.rows(), d = points.cols();
  Mat acc = Mat::Zero(d, d);
  for (Eigen::Index start = 0; start < n; start += kSampleShard) {
    const Eigen::Index len = std::min(kSampleShard, n - start);
    const auto block = points.middleRows(start, len);
    acc.noalias() += block.transpose() * block;
  }
  return acc / static_cast<double>(n);
}

// Top-k left singular subspace of the d x N sample matrix, from the
// eigendecomposition of X X^T / N. When d <= k the identity basis is used.
inline ProjectionReport reduce(const SampleBatch& samples, int k,
                               const std::optional<std::vector<Vec>>& true_means = std::nullopt) {
  const Eigen::Index n = samples.size();
  const int d = samples.dim();
  if (k < 1) throw InvalidInput("reduce: k must be positive");
  if (n < k) throw InvalidInput("reduce: fewer samples than k");

  const Mat a = second_moment(samples.points);
  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  const Vec evals = eig.eigenvalues();  // ascending
  ProjectionReport rep;
  const Eigen::Index count = std::min<Eigen::Index>(d, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double lambda = std::max(0.0, evals(d - 1 - i));
    rep.singular_values.push_back(std::sqrt(lambda * static_cast<double>(n)));
  }
  if (d <= k) {
    rep.basis = Mat::Identity(d, d);
    rep.projected_samples = samples.points;
  } else {
    rep.basis.resize(d, k);
    for (int c = 0; c < k; ++c) {
      Vec col = eig.eigenvectors().col(d - 1 - c);
      // Sign convention: largest-magnitude entry positive.
      Eigen::Index arg;
      col.cwiseAbs().maxCoeff(&arg);
      if (col(arg) < 0) col = -col;
      rep.basis.col(c) = col;
    }
    rep.projected_samples = samples.points * rep.basis;
  }
  if (true_means) {
    std::vector<Vec> hint;
    for (const auto& m : *true_means) hint.push_back(rep.basis * (rep.basis.transpose() * m));
    rep.projected_means_hint = std::move(hint);
  }
  return rep;
}

inline void write_singular_values_csv(const ProjectionReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "index,singular_value\n" << std::setprecision(17);
  for (size_t i = 0; i < rep.singular_values.size(); ++i) out << i << ',' << rep.singular_values[i] << '\n';
}

}  // namespace sgmix
