#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core/density.hpp"
#include "sgmix/core/errors.hpp"
#include "sgmix/core/mixture_io.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/init/cluster.hpp"
#include "sgmix/init/density_estimate.hpp"
#include "sgmix/init/maxima.hpp"
#include "sgmix/init/net.hpp"
#include "sgmix/init/sigma_weight.hpp"

namespace sgmix {

struct InitConfig {
  NetConfig net;
  DerivedStats bounds;         // w_min, sigma_min, sigma_max, rho as known to the learner
  std::optional<double> kappa;  // default: one-eighth of the cluster diameter
  double kappa_cap = 0.0;       // 0 means 4 sigma_max
};

struct InitReport {
  std::vector<Vec> means;
  std::vector<double> sigmas;
  std::vector<double> weights;
  std::vector<int> cluster_sizes;
  std::vector<double> cluster_diameters;
  double min_cluster_gap = 0.0;
  long net_points = 0;
  long candidates = 0;
  std::array<long, 3> pass_counts{0, 0, 0};
  std::vector<double> peak_density;
  std::vector<double> sigma_tolerances;
  std::vector<double> kappas;
  std::vector<double> weight_standard_errors;
  std::vector<std::string> warnings;
  double eps0 = 0.0;

  int k() const { return static_cast<int>(means.size()); }
};

// Pointwise leakage terms at x for component j: other components' density,
// and its first and second radial moments, against the thresholds set by c0.
struct InitLeakage {
  double mass = 0.0, first = 0.0, second = 0.0;
  double mass_bound = 0.0, moment_bound = 0.0;
  bool holds() const { return mass < mass_bound && first < moment_bound && second < moment_bound; }
};

inline InitLeakage init_leakage(const MixtureParams& mix, int j, const Vec& x, double c0) {
  const auto s = mix.stats();
  const double d = static_cast<double>(mix.dim());
  const double ratio = s.sigma_min / s.sigma_max;
  const double own = mix[j].weight * component_density(mix[j], x) * std::exp(-c0 * d);
  InitLeakage out;
  out.mass_bound = own * ratio * ratio;
  out.moment_bound = own * std::pow(ratio, 4);
  for (int i = 0; i < mix.k(); ++i) {
    if (i == j) continue;
    const double g = mix[i].weight * component_density(mix[i], x);
    const double r = (x - mix[i].mean).norm() / mix[i].sigma;
    out.mass += g;
    out.first += r * g;
    out.second += r * r * g;
  }
  return out;
}

namespace detail {

inline nlohmann::json candidate_map(const std::vector<LocalMaxCandidate>& cands, size_t limit = 2000) {
  nlohmann::json arr = nlohmann::json::array();
  for (size_t i = 0; i < cands.size() && i < limit; ++i) {
    arr.push_back({{"point", to_std(cands[i].point)},
                   {"f", cands[i].f},
                   {"grad_norm", cands[i].grad_norm},
                   {"hess_max", cands[i].hess_max}});
  }
  return arr;
}

inline InitReport run_initializer(const DensityOracle& oracle, const SampleBatch& weight_samples, int d, int k,
                                  const InitConfig& cfg) {
  if (k < 1) throw InvalidInput("initialize: k must be positive");
  if (d < 1) throw InvalidInput("initialize: dimension must be positive");
  if (d > 6) throw InvalidInput("initialize: the net search is limited to d <= 6; reduce the dimension first");
  InitReport rep;
  rep.eps0 = cfg.net.eps0;

  const RowMat net = build_net(cfg.net, d);
  rep.net_points = static_cast<long>(net.rows());
  const auto estimates = oracle(net);
  auto scan = find_approx_maxima(net, estimates, cfg.bounds, cfg.net.eps0);
  rep.candidates = static_cast<long>(scan.accepted.size());
  rep.pass_counts = scan.pass_counts;
  rep.warnings = scan.warnings;

  std::vector<Vec> pts;
  for (const auto& c : scan.accepted) pts.push_back(c.point);
  if (static_cast<int>(pts.size()) < k) {
    throw StageFailure("initializer found " + std::to_string(pts.size()) + " approximate maxima for k=" +
                           std::to_string(k) + "; refine the net or add samples",
                       {{"stage", "cluster"},
                        {"net_points", rep.net_points},
                        {"pass_counts", rep.pass_counts},
                        {"candidates", candidate_map(scan.accepted)}});
  }
  const Clustering cl = single_linkage_cluster(pts, k);
  if (static_cast<int>(cl.clusters.size()) != k) {
    throw StageFailure("single linkage returned " + std::to_string(cl.clusters.size()) + " clusters for k=" +
                           std::to_string(k),
                       {{"stage", "cluster"}, {"candidates", candidate_map(scan.accepted)}});
  }
  rep.min_cluster_gap = cl.min_gap;
  rep.cluster_diameters = cl.diameters;
  const double max_diam = *std::max_element(cl.diameters.begin(), cl.diameters.end());
  if (k > 1 && !(max_diam < cl.min_gap)) {
    rep.warnings.push_back("a cluster diameter (" + std::to_string(max_diam) + ") reaches the inter-cluster gap (" +
                           std::to_string(cl.min_gap) + ")");
  }

  const double cap = cfg.kappa_cap > 0.0 ? cfg.kappa_cap : 4.0 * cfg.bounds.sigma_max;
  for (int c = 0; c < k; ++c) {
    const auto& members = cl.clusters[c];
    int best = members.front();
    for (int m : members) {
      if (scan.accepted[m].f > scan.accepted[best].f) best = m;
    }
    const Vec mu = scan.accepted[best].point;
    double kappa0 = cfg.kappa.value_or(cl.diameters[c] / 8.0);
    if (!(kappa0 > 0.0)) kappa0 = std::max(cfg.net.spacing, 1e-3 * cfg.bounds.sigma_min);
    const SigmaEstimate se = estimate_sigma_adaptive(mu, oracle, kappa0, cap);
    if (!se.ok) {
      throw StageFailure("sigma estimation failed for cluster " + std::to_string(c),
                         {{"stage", "sigma"},
                          {"cluster", c},
                          {"mean", to_std(mu)},
                          {"kappa", se.kappa},
                          {"log_ratio", se.log_ratio}});
    }
    const WeightEstimate we = estimate_weight(mu, se.sigma, weight_samples);
    rep.means.push_back(mu);
    rep.sigmas.push_back(se.sigma);
    rep.weights.push_back(we.weight);
    rep.cluster_sizes.push_back(static_cast<int>(members.size()));
    rep.peak_density.push_back(scan.accepted[best].f);
    rep.sigma_tolerances.push_back(se.tolerance);
    rep.kappas.push_back(se.kappa);
    rep.weight_standard_errors.push_back(we.standard_error);
    if (we.weight > 1.0) rep.warnings.push_back("weight estimate above 1 for cluster " + std::to_string(c));
  }

  // Separation of the recovered means against the multiplier the initializer
  // relies on, 4 c0 (sqrt(d) + sqrt(log(rho_w rho_sigma))); advisory only.
  const auto smin = *std::min_element(rep.sigmas.begin(), rep.sigmas.end());
  const auto smax = *std::max_element(rep.sigmas.begin(), rep.sigmas.end());
  const auto wmin = *std::min_element(rep.weights.begin(), rep.weights.end());
  const auto wmax = *std::max_element(rep.weights.begin(), rep.weights.end());
  const double mult = 4.0 * cfg.net.c0 *
                      (std::sqrt(static_cast<double>(d)) + std::sqrt(std::max(0.0, std::log(wmax / wmin * smax / smin))));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const double need = mult * (rep.sigmas[a] + rep.sigmas[b]);
      if ((rep.means[a] - rep.means[b]).norm() < need) {
        rep.warnings.push_back("recovered means " + std::to_string(a) + "," + std::to_string(b) +
                               " are closer than the initializer's separation requirement " + std::to_string(need));
      }
    }
  }
  return rep;
}

}  // namespace detail

inline InitReport initialize(const SampleBatch& samples, int k, const InitConfig& cfg) {
  const SampleDensityOracle oracle(samples, cfg.net.estimation_ball_radius);
  return detail::run_initializer(std::cref(oracle), samples, samples.dim(), k, cfg);
}

// Densities and derivatives from the mixture itself; weights still come from
// draws (weight_samples of them, seeded).
inline InitReport initialize_exact(const MixtureParams& mix, const InitConfig& cfg, Eigen::Index weight_samples,
                                   std::uint64_t seed) {
  const SampleBatch draws = sample(mix, weight_samples, seed);
  return detail::run_initializer(exact_oracle(mix), draws, mix.dim(), mix.k(), cfg);
}

inline nlohmann::json to_json(const InitReport& r) {
  nlohmann::json means = nlohmann::json::array();
  for (const auto& m : r.means) means.push_back(to_std(m));
  return {{"means", means},
          {"sigmas", r.sigmas},
          {"weights", r.weights},
          {"cluster_sizes", r.cluster_sizes},
          {"cluster_diameters", r.cluster_diameters},
          {"min_cluster_gap", r.min_cluster_gap},
          {"net_points", r.net_points},
          {"candidates", r.candidates},
          {"pass_counts", r.pass_counts},
          {"peak_density", r.peak_density},
          {"sigma_tolerances", r.sigma_tolerances},
          {"kappas", r.kappas},
          {"weight_standard_errors", r.weight_standard_errors},
          {"eps0", r.eps0},
          {"warnings", r.warnings}};
}

// Reads the "means" array of an init report (or a bare array of means).
inline std::vector<Vec> init_means_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : j.at("means");
  if (!arr.is_array() || arr.empty()) throw InvalidInput("init file: expected a non-empty array of means");
  std::vector<Vec> out;
  for (const auto& m : arr) out.push_back(to_vec(m));
  for (const auto& m : out) {
    if (m.size() != out.front().size()) throw InvalidInput("init file: means disagree on dimension");
  }
  return out;
}

}  // namespace sgmix
