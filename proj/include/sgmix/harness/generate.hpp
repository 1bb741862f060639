#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sgmix/core/mixture.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/core/separation.hpp"

namespace sgmix {

struct GeneratorSpec {
  int k = 2;
  int d = 1;
  double separation = 4.0;          // multiplier c for separation_audit
  std::string weights = "uniform";  // uniform | random
  std::string sigmas = "unit";      // unit | random
  double weight_spread = 2.0;       // random weights drawn from [1, spread] then normalized
  double sigma_min = 0.8, sigma_max = 1.25;

  void validate() const {
    if (k < 1 || d < 1) throw InvalidInput("generator: k and d must be positive");
    if (!(separation >= 0.0)) throw InvalidInput("generator: separation must be nonnegative");
    if (weights != "uniform" && weights != "random") throw InvalidInput("generator: weights must be uniform or random");
    if (sigmas != "unit" && sigmas != "random") throw InvalidInput("generator: sigmas must be unit or random");
    if (!(weight_spread >= 1.0) || !(sigma_min > 0.0) || !(sigma_max >= sigma_min)) {
      throw InvalidInput("generator: bad weight or sigma range");
    }
  }
};

// Draws weights and sigmas, then places means one at a time uniformly in a
// ball, rejecting any that would break the separation audit at multiplier c.
// The ball grows by 10% after every 2000 consecutive rejections.
inline MixtureParams generate_mixture(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, "harness:generate", 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(static_cast<size_t>(spec.k), 1.0), s(static_cast<size_t>(spec.k), 1.0);
  if (spec.weights == "random") {
    double total = 0.0;
    for (auto& x : w) total += (x = 1.0 + (spec.weight_spread - 1.0) * unif(rng));
    for (auto& x : w) x /= total;
  } else {
    for (auto& x : w) x = 1.0 / spec.k;
  }
  if (spec.sigmas == "random") {
    for (auto& x : s) x = spec.sigma_min * std::pow(spec.sigma_max / spec.sigma_min, unif(rng));
  }
  const DerivedStats stats = stats_from(w, s);
  const double scale = separation_scale(spec.d, stats);
  const double smax = *std::max_element(s.begin(), s.end());
  double radius = std::max(1e-9, spec.separation * scale * smax * std::pow(spec.k, 1.0 / spec.d));
  std::vector<Vec> means;
  int rejections = 0;
  while (static_cast<int>(means.size()) < spec.k) {
    Vec dir(spec.d);
    for (int a = 0; a < spec.d; ++a) dir(a) = normal(rng);
    dir /= dir.norm();
    const Vec cand = dir * radius * std::pow(unif(rng), 1.0 / spec.d);
    bool ok = true;
    const size_t j = means.size();
    for (size_t i = 0; i < means.size() && ok; ++i) {
      ok = (cand - means[i]).norm() >= spec.separation * (s[i] + s[j]) * scale;
    }
    if (ok) {
      means.push_back(cand);
      rejections = 0;
    } else if (++rejections >= 2000) {
      radius *= 1.1;
      rejections = 0;
    }
  }
  std::vector<Component> comps;
  for (int j = 0; j < spec.k; ++j) comps.push_back({w[j], means[j], s[j]});
  return MixtureParams(std::move(comps));
}

}  // namespace sgmix
