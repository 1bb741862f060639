#pragma once

#include <Eigen/Dense>

#include "sgmix/core/errors.hpp"

namespace sgmix {

// Central differences, one column per coordinate of x.
template <class F>
Eigen::MatrixXd finite_diff_jacobian(const F& fn, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite_diff_jacobian: step must be positive");
  const Eigen::VectorXd f0 = fn(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    jac.col(c) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace sgmix
