#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core/errors.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/lab/distances.hpp"

namespace sgmix {

struct TournamentConfig {
  std::vector<MixtureParams> candidates;
  double delta = 0.05;
  Eigen::Index samples = 0;            // draws from the unknown distribution; 0 = default_budget()
  Eigen::Index reference_samples = 0;  // draws per candidate for Pr_{D_i}[A_ij]; 0 = 4 x samples
  bool quadrature_masses = true;       // exact masses in d = 1
  std::uint64_t seed = 0;

  // Enough draws for every empirical mass p_ij to land within delta / 2 of its
  // mean with failure probability below 1/|T| by Hoeffding and a union bound
  // over |T|^2 sets: m = 2 delta^{-2} ln(2 |T|^3).
  Eigen::Index default_budget() const {
    const double t = static_cast<double>(candidates.size());
    return static_cast<Eigen::Index>(std::ceil(2.0 / (delta * delta) * std::log(2.0 * t * t * t)));
  }

  void validate() const {
    if (candidates.size() < 2) throw InvalidInput("tournament: need at least two candidates");
    if (!(delta > 0.0)) throw InvalidInput("tournament: delta must be positive");
    for (const auto& c : candidates) {
      if (c.dim() != candidates.front().dim()) throw InvalidInput("tournament: candidates differ in dimension");
    }
  }
};

struct ScheffeResult {
  int winner = -1;
  double threshold = 0.0;                // 3 delta / 2
  std::vector<double> worst_deviation;   // per candidate: max_j |p_ij - Pr_{D_i}[A_ij]|
  Mat empirical;                         // p_ij
  Mat reference;                         // Pr_{D_i}[A_ij]
  Eigen::Index samples = 0;
};

namespace detail {

// Pr_{D_i}[f_i > f_j] in one dimension: f_i integrated over the intervals
// where it dominates, split at the crossings.
inline double dominance_mass_1d(const MixtureParams& fi, const MixtureParams& fj) {
  const auto [lo, hi] = covering_box(fi, fj);
  auto pts = breakpoints_1d(fi, fj, lo(0), hi(0));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double mass = 0.0;
  for (size_t s = 0; s + 1 < pts.size(); ++s) {
    const double mid = 0.5 * (pts[s] + pts[s + 1]);
    if (pdf1(fi, mid) <= pdf1(fj, mid)) continue;
    mass += integrate([&](double x) { return pdf1(fi, x); }, pts[s], pts[s + 1], 1e-14).value;
  }
  return mass;
}

inline Mat pdf_table(const std::vector<MixtureParams>& cands, const RowMat& pts) {
  Mat t(static_cast<Eigen::Index>(cands.size()), pts.rows());
  Vec x(pts.cols());
  for (Eigen::Index n = 0; n < pts.rows(); ++n) {
    x = pts.row(n).transpose();
    for (size_t i = 0; i < cands.size(); ++i) t(static_cast<Eigen::Index>(i), n) = pdf_at(cands[i], x);
  }
  return t;
}

// Fraction of columns where row i exceeds row j.
inline Mat win_fractions(const Mat& table) {
  const Eigen::Index t = table.rows();
  Mat p = Mat::Zero(t, t);
  for (Eigen::Index n = 0; n < table.cols(); ++n)
    for (Eigen::Index i = 0; i < t; ++i)
      for (Eigen::Index j = 0; j < t; ++j)
        if (i != j && table(i, n) > table(j, n)) p(i, j) += 1.0;
  return p / static_cast<double>(table.cols());
}

}  // namespace detail

// Returns the first candidate i with |p_ij - Pr_{D_i}[A_ij]| <= 3 delta / 2
// for every j, where A_ij = {f_i > f_j} and p_ij is its empirical mass under
// the observed samples.
inline ScheffeResult scheffe_select(const TournamentConfig& cfg, const SampleBatch& observed) {
  cfg.validate();
  const auto& cands = cfg.candidates;
  const Eigen::Index t = static_cast<Eigen::Index>(cands.size());
  if (observed.dim() != cands.front().dim()) throw InvalidInput("tournament: samples differ in dimension");
  ScheffeResult res;
  res.threshold = 1.5 * cfg.delta;
  res.samples = observed.size();
  res.empirical = detail::win_fractions(detail::pdf_table(cands, observed.points));
  res.reference = Mat::Zero(t, t);
  const bool exact = cfg.quadrature_masses && cands.front().dim() == 1;
  const Eigen::Index ref_n = cfg.reference_samples > 0 ? cfg.reference_samples : 4 * observed.size();
  for (Eigen::Index i = 0; i < t; ++i) {
    if (exact) {
      for (Eigen::Index j = 0; j < t; ++j)
        if (j != i) res.reference(i, j) = detail::dominance_mass_1d(cands[i], cands[j]);
    } else {
      const auto draws = sample(cands[i], ref_n, derive_seed(cfg.seed, "lab:scheffe-reference", i));
      res.reference.row(i) = detail::win_fractions(detail::pdf_table(cands, draws.points)).row(i);
    }
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    const double dev = (res.empirical.row(i) - res.reference.row(i)).cwiseAbs().maxCoeff();
    res.worst_deviation.push_back(dev);
    if (res.winner < 0 && dev <= res.threshold) res.winner = static_cast<int>(i);
  }
  if (res.winner < 0) {
    throw StageFailure("no candidate passed the tournament; raise the sample budget or delta",
                       {{"stage", "tournament"},
                        {"threshold", res.threshold},
                        {"worst_deviation", res.worst_deviation},
                        {"samples", res.samples}});
  }
  return res;
}

inline nlohmann::json to_json(const ScheffeResult& r) {
  return {{"winner", r.winner},
          {"threshold", r.threshold},
          {"worst_deviation", r.worst_deviation},
          {"samples", r.samples}};
}

}  // namespace sgmix
