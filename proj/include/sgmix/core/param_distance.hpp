#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sgmix/core/mixture.hpp"

namespace sgmix {

struct ParamDistance {
  double value = 0.0;
  // permutation[j] = index of the component of the second mixture matched to component j.
  std::vector<int> permutation;
};

// Cost of matching component a of the first mixture to component b of the second.
inline double param_pair_cost(const Component& a, const Component& b) {
  const double wm = std::min(a.weight, b.weight);
  const double sm = std::min(a.sigma, b.sigma);
  return std::abs(a.weight - b.weight) / wm + (a.mean - b.mean).norm() / sm +
         std::abs(a.sigma - b.sigma) / sm;
}

inline Mat param_cost_matrix(const MixtureParams& g, const MixtureParams& h) {
  if (g.k() != h.k() || g.dim() != h.dim()) {
    throw InvalidInput("param_distance: mixtures differ in k or d");
  }
  const int k = g.k();
  Mat cost(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) cost(a, b) = param_pair_cost(g[a], h[b]);
  return cost;
}

// Minimum-cost perfect assignment (Hungarian method with potentials).
// Returns assignment[row] = column.
inline std::vector<int> min_cost_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n);
  for (int j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

inline ParamDistance param_distance(const MixtureParams& g, const MixtureParams& h) {
  const Mat cost = param_cost_matrix(g, h);
  ParamDistance out;
  out.permutation = min_cost_assignment(cost);
  for (int j = 0; j < g.k(); ++j) out.value += cost(j, out.permutation[j]);
  return out;
}

// Exhaustive search over permutations; exact and used as a cross-check for small k.
inline ParamDistance param_distance_bruteforce(const MixtureParams& g, const MixtureParams& h) {
  const Mat cost = param_cost_matrix(g, h);
  if (g.k() > 8) throw InvalidInput("param_distance_bruteforce: k > 8");
  std::vector<int> perm(g.k());
  std::iota(perm.begin(), perm.end(), 0);
  ParamDistance best;
  best.value = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int j = 0; j < g.k(); ++j) total += cost(j, perm[j]);
    if (total < best.value) {
      best.value = total;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace sgmix
