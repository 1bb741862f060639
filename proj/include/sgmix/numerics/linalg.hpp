#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "sgmix/core/errors.hpp"

namespace sgmix {

// Maximum absolute row sum.
inline double inf_operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

struct VarahBound {
  double margin = 0.0;          // min_i (a_ii - sum_{j != i} |a_ij|)
  std::optional<double> bound;  // 1 / margin when margin > 0
  bool dominant() const { return bound.has_value(); }
};

inline VarahBound varah_inverse_bound(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidInput("varah_inverse_bound: matrix not square");
  VarahBound out;
  out.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double off = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
    out.margin = std::min(out.margin, a(i, i) - off);
  }
  if (out.margin > 0.0) out.bound = 1.0 / out.margin;
  return out;
}

}  // namespace sgmix
