#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "sgmix/core/errors.hpp"
#include "sgmix/core/mixture.hpp"

namespace sgmix {

struct Clustering {
  std::vector<std::vector<int>> clusters;  // indices into the input, each sorted
  std::vector<double> diameters;
  double min_gap = std::numeric_limits<double>::infinity();  // smallest cross-cluster distance
};

inline bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Single linkage stopped at k clusters: build the minimum spanning tree with
// Prim, then cut its k-1 longest edges. Points are visited in lexicographic
// order and equal-length edges are ordered by endpoint rank, so ties resolve
// the same way on every run.
inline Clustering single_linkage_cluster(const std::vector<Vec>& points, int k) {
  const int n = static_cast<int>(points.size());
  if (k < 1) throw InvalidInput("single_linkage_cluster: k must be positive");
  if (n < k) {
    throw StageFailure("single linkage needs at least k points; got " + std::to_string(n) + " for k=" +
                           std::to_string(k),
                       {{"points", n}, {"k", k}});
  }
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lex_less(points[a], points[b]); });

  struct Edge {
    double length;
    int a, b;  // ranks in lexicographic order
  };
  std::vector<Edge> tree;
  std::vector<double> best(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<size_t>(n), -1);
  std::vector<bool> in_tree(static_cast<size_t>(n), false);
  best[0] = 0.0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int r = 0; r < n; ++r) {
      if (!in_tree[r] && (u < 0 || best[r] < best[u])) u = r;
    }
    in_tree[u] = true;
    if (parent[u] >= 0) tree.push_back({best[u], std::min(parent[u], u), std::max(parent[u], u)});
    for (int r = 0; r < n; ++r) {
      if (in_tree[r]) continue;
      const double dist = (points[order[u]] - points[order[r]]).norm();
      if (dist < best[r]) {
        best[r] = dist;
        parent[r] = u;
      }
    }
  }
  std::stable_sort(tree.begin(), tree.end(), [](const Edge& x, const Edge& y) {
    if (x.length != y.length) return x.length > y.length;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  std::vector<int> root(static_cast<size_t>(n));
  std::iota(root.begin(), root.end(), 0);
  const auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  Clustering out;
  for (size_t e = static_cast<size_t>(k - 1); e < tree.size(); ++e) {
    const int ra = find(tree[e].a), rb = find(tree[e].b);
    root[std::max(ra, rb)] = std::min(ra, rb);
  }
  if (k > 1 && !tree.empty()) out.min_gap = tree[static_cast<size_t>(k - 2)].length;

  std::vector<int> label(static_cast<size_t>(n), -1);
  for (int r = 0; r < n; ++r) {
    const int top = find(r);
    if (label[top] < 0) {
      label[top] = static_cast<int>(out.clusters.size());
      out.clusters.emplace_back();
    }
    out.clusters[label[top]].push_back(order[r]);
  }
  for (auto& c : out.clusters) {
    std::sort(c.begin(), c.end());
    double diam = 0.0;
    for (size_t a = 0; a < c.size(); ++a)
      for (size_t b = a + 1; b < c.size(); ++b) diam = std::max(diam, (points[c[a]] - points[c[b]]).norm());
    out.diameters.push_back(diam);
  }
  return out;
}

inline Clustering single_linkage_cluster(const std::vector<double>& points, int k) {
  std::vector<Vec> pts;
  for (double x : points) pts.push_back(Vec::Constant(1, x));
  return single_linkage_cluster(pts, k);
}

}  // namespace sgmix
