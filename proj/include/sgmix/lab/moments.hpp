#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgmix/core/errors.hpp"
#include "sgmix/core/mixture.hpp"

namespace sgmix {

// Symmetric order-r tensor over R^d stored once per multiset of indices
// (nondecreasing index tuples, in lexicographic order). Entry values are the
// tensor entries themselves; multiplicity() gives how many full-tensor
// positions each stored entry stands for.
class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(int d, int r) : d_(d), r_(r) {
    if (d < 1 || r < 1) throw InvalidInput("SymTensor: dimension and order must be positive");
    std::vector<int> idx(static_cast<size_t>(r), 0);
    while (true) {
      index_.push_back(idx);
      int pos = r - 1;
      while (pos >= 0 && idx[pos] == d - 1) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int q = pos + 1; q < r; ++q) idx[q] = idx[pos];
    }
    values_.assign(index_.size(), 0.0);
    multiplicity_.resize(index_.size());
    for (size_t e = 0; e < index_.size(); ++e) {
      double m = std::tgamma(r + 1.0);
      int run = 1;
      for (int q = 1; q <= r; ++q) {
        if (q < r && index_[e][q] == index_[e][q - 1]) {
          ++run;
        } else {
          m /= std::tgamma(run + 1.0);
          run = 1;
        }
      }
      multiplicity_[e] = std::round(m);
    }
  }

  int dim() const { return d_; }
  int order() const { return r_; }
  size_t size() const { return values_.size(); }
  const std::vector<int>& index(size_t e) const { return index_[e]; }
  double multiplicity(size_t e) const { return multiplicity_[e]; }
  double& operator[](size_t e) { return values_[e]; }
  double operator[](size_t e) const { return values_[e]; }
  const std::vector<double>& values() const { return values_; }

  // <T, y^{(x) r}>
  double contract(const Vec& y) const {
    double total = 0.0;
    for (size_t e = 0; e < values_.size(); ++e) {
      double p = multiplicity_[e] * values_[e];
      for (int a : index_[e]) p *= y(a);
      total += p;
    }
    return total;
  }

  // T(y, ..., y, .) = gradient of <T, y^r> divided by r.
  Vec contract_all_but_one(const Vec& y) const {
    Vec g = Vec::Zero(d_);
    for (size_t e = 0; e < values_.size(); ++e) {
      const auto& idx = index_[e];
      for (int q = 0; q < r_; ++q) {
        if (q > 0 && idx[q] == idx[q - 1]) continue;  // each distinct index once, weighted by its count
        int count = 0;
        double p = multiplicity_[e] * values_[e];
        bool skipped = false;
        for (int s = 0; s < r_; ++s) {
          if (idx[s] == idx[q]) ++count;
          if (idx[s] == idx[q] && !skipped) {
            skipped = true;
            continue;
          }
          p *= y(idx[s]);
        }
        g(idx[q]) += p * count / r_;
      }
    }
    return g;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (size_t e = 0; e < values_.size(); ++e) s += multiplicity_[e] * values_[e] * values_[e];
    return std::sqrt(s);
  }

  SymTensor operator-(const SymTensor& o) const {
    if (o.d_ != d_ || o.r_ != r_) throw InvalidInput("SymTensor: shape mismatch");
    SymTensor out = *this;
    for (size_t e = 0; e < values_.size(); ++e) out.values_[e] -= o.values_[e];
    return out;
  }

 private:
  int d_ = 0, r_ = 0;
  std::vector<std::vector<int>> index_;
  std::vector<double> values_;
  std::vector<double> multiplicity_;
};

struct MomentVector {
  int order = 0;
  std::vector<SymTensor> tensors;  // tensors[r-1] = M_r
};

// M_r = (1/k) sum_j mu_j^{(x) r}, r = 1..R. Means are visited in lexicographic
// order so any permutation of the input gives bitwise identical sums.
inline MomentVector mean_moments(std::vector<Vec> means, int R) {
  if (R < 1) throw InvalidInput("mean_moments: R must be at least 1");
  if (means.empty()) throw InvalidInput("mean_moments: need at least one mean");
  const int d = static_cast<int>(means.front().size());
  for (const auto& m : means) {
    if (m.size() != d) throw InvalidInput("mean_moments: means disagree on dimension");
  }
  std::sort(means.begin(), means.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  const double inv_k = 1.0 / static_cast<double>(means.size());
  MomentVector mv;
  mv.order = R;
  for (int r = 1; r <= R; ++r) {
    SymTensor t(d, r);
    for (const auto& mu : means) {
      for (size_t e = 0; e < t.size(); ++e) {
        double p = 1.0;
        for (int a : t.index(e)) p *= mu(a);
        t[e] += p;
      }
    }
    for (size_t e = 0; e < t.size(); ++e) t[e] *= inv_k;
    mv.tensors.push_back(std::move(t));
  }
  return mv;
}

}  // namespace sgmix
