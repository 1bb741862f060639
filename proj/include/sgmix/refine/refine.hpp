#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core/mixture_io.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/core/separation.hpp"
#include "sgmix/numerics/newton.hpp"
#include "sgmix/refine/estimate_b.hpp"
#include "sgmix/refine/moment_system.hpp"
#include "sgmix/refine/region.hpp"

namespace sgmix {

struct RefineConfig {
  double delta = 1e-3;                    // target accuracy, in units of sigma
  Eigen::Index samples_per_jacobian_component = 200000;
  int iterations = 0;                     // 0: ceil(C log log(d / delta))
  double iteration_constant = 4.0;        // C
  bool exact_quadrature = false;          // one dimension only
  bool antithetic = true;
  std::uint64_t seed = 0;
  double eps0_constant = 1.0;             // eps0 = c0 * min(d, k)^{-5/2}
  double separation_gate = 4.0;           // warn when the initializers are closer than this multiplier
  double eta_constant = 1.0;              // c' in eta = delta w_min / (c' sqrt(d) rho_sigma)
};

inline void validate(const RefineConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("refine: delta must lie in (0, 1)");
  if (cfg.samples_per_jacobian_component < 1) throw InvalidInput("refine: N_J must be at least 1");
  if (cfg.iterations < 0) throw InvalidInput("refine: iterations must be nonnegative");
}

inline int default_iterations(int d, double delta, double c) {
  const double inner = std::log(static_cast<double>(d) / delta);
  const double t = inner > 1.0 ? std::ceil(c * std::log(inner)) : 1.0;
  return std::max(1, static_cast<int>(t));
}

inline double refine_eps0(int d, int k, double c0) { return c0 * std::pow(static_cast<double>(std::min(d, k)), -2.5); }

struct RefineResult {
  std::vector<Vec> means;
  SolveReport report;  // iterates in normalized coordinates x_j = mu_j / sigma_j
  std::vector<Region> regions;
  VectorEstimate target;
  std::vector<Eigen::Index> region_hits;
  std::vector<std::string> warnings;
  bool skipped = false;  // delta >= eps0: initializers returned as they are
  int iterations_planned = 0;
  double eps0 = 0.0;
  double eta_target = 0.0;
  // max_j |mu_j^(t) - mu*_j|_2 / sigma_j for t = 0..T, when the truth is supplied
  std::vector<double> errors_vs_truth;
};

namespace detail {

inline std::vector<std::string> refine_gates(const std::vector<Vec>& init, const KnownParams& known,
                                             const DerivedStats& stats, const RefineConfig& cfg) {
  std::vector<std::string> warnings;
  if (init.size() >= 2) {
    const SeparationReport sep = separation_audit(init, known.sigmas, stats, cfg.separation_gate);
    if (!sep.all_pass()) {
      warnings.push_back("initializers fail the separation audit at c=" + std::to_string(cfg.separation_gate) +
                         " (largest passing multiplier " + std::to_string(sep.max_passing_multiplier()) + ")");
    }
  }
  return warnings;
}

inline double max_relative_error(const std::vector<Vec>& est, const std::vector<Vec>& truth,
                                 const std::vector<double>& sigmas) {
  double worst = 0.0;
  for (size_t j = 0; j < est.size(); ++j) worst = std::max(worst, (est[j] - truth[j]).norm() / sigmas[j]);
  return worst;
}

inline RefineResult run_refinement(const MomentSystem& system, const VectorEstimate& target,
                                   const std::vector<Vec>& initializers, const DerivedStats& stats,
                                   const RefineConfig& cfg, const std::optional<std::vector<Vec>>& truth) {
  RefineResult res;
  const int k = system.k(), d = system.dim();
  res.regions = system.regions();
  res.target = target;
  res.eps0 = refine_eps0(d, k, cfg.eps0_constant);
  res.eta_target = cfg.delta * stats.w_min / (cfg.eta_constant * std::sqrt(static_cast<double>(d)) * stats.rho_sigma);
  res.iterations_planned = cfg.iterations > 0 ? cfg.iterations : default_iterations(d, cfg.delta, cfg.iteration_constant);
  res.warnings = refine_gates(initializers, system.known(), stats, cfg);
  if (truth) {
    const double init_err = max_relative_error(initializers, *truth, system.known().sigmas);
    if (init_err > res.eps0) {
      res.warnings.push_back("initializer error " + std::to_string(init_err) + " exceeds eps0 " +
                             std::to_string(res.eps0));
    }
    res.errors_vs_truth.push_back(init_err);
  }
  if (cfg.delta >= res.eps0) {
    res.skipped = true;
    res.means = initializers;
    return res;
  }

  const MonteCarloConfig mc{cfg.samples_per_jacobian_component, cfg.seed, cfg.antithetic};
  SystemOracle oracle;
  if (cfg.exact_quadrature) {
    oracle.eval_F = [&](const Vec& delta, int) { return system.F_quadrature(delta); };
    oracle.eval_Fprime = [&](const Vec& delta, int) { return system.Fprime_quadrature(delta); };
  } else {
    oracle.eval_F = [&, mc](const Vec& delta, int t) { return system.F_monte_carlo(delta, mc, static_cast<std::uint64_t>(t)); };
    oracle.eval_Fprime = [&, mc](const Vec& delta, int t) {
      return system.Fprime_monte_carlo(delta, mc, static_cast<std::uint64_t>(t));
    };
  }
  oracle.target = target;

  SolveConfig scfg;
  scfg.max_iterations = res.iterations_planned;
  scfg.stop_tolerance = cfg.delta / std::sqrt(static_cast<double>(d));
  scfg.neighborhood_radius = res.eps0;
  scfg.require_dominance = true;
  // Newton runs on offsets from the anchors; the report is converted to
  // normalized means afterwards.
  SolveReport rep = newton_solve(oracle, Vec::Zero(system.size()), scfg);
  const Vec last_offsets = rep.final_iterate();
  res.means = system.means_from_offsets(last_offsets);
  if (truth) {
    for (const auto& it : rep.iterates) {
      res.errors_vs_truth.push_back(max_relative_error(system.means_from_offsets(it), *truth, system.known().sigmas));
    }
  }
  rep.initial = system.to_normalized(rep.initial);
  for (auto& it : rep.iterates) it = system.to_normalized(it);
  res.report = std::move(rep);

  if (res.report.status == SolveStatus::NotDominant || res.report.status == SolveStatus::SingularJacobian ||
      res.report.status == SolveStatus::LeftNeighborhood) {
    nlohmann::json diag;
    diag["solve_report"] = to_json(res.report);
    diag["warnings"] = res.warnings;
    throw StageFailure("refine: " + res.report.message, diag);
  }
  return res;
}

inline double max_norm(const std::vector<Vec>& init) {
  double m = 0.0;
  for (const auto& z : init) m = std::max(m, z.norm());
  return m;
}

}  // namespace detail

// Sampled refinement: b is estimated from `samples`; F and F' by Monte Carlo
// (or by quadrature when cfg.exact_quadrature is set in one dimension).
inline RefineResult refine(const SampleBatch& samples, const std::vector<Vec>& initializers, const KnownParams& known,
                           const RefineConfig& cfg, const std::optional<std::vector<Vec>>& truth = std::nullopt) {
  validate(cfg);
  const DerivedStats stats = stats_from(known.weights, known.sigmas, detail::max_norm(initializers));
  MomentSystem system(build_regions(initializers, known, stats), known);
  if (cfg.exact_quadrature && system.dim() != 1) throw InvalidInput("refine: exact quadrature needs d = 1");
  const BEstimate b = estimate_b(samples, system.regions(), known);
  if (!b.empty_components.empty()) {
    nlohmann::json diag;
    diag["empty_components"] = b.empty_components;
    throw StageFailure("refine: region with no samples", diag);
  }
  RefineResult res = detail::run_refinement(system, b.estimate, initializers, stats, cfg, truth);
  res.region_hits = b.hits;
  return res;
}

// Noiseless refinement in one dimension: b = F(x*) and F, F' by quadrature.
inline RefineResult refine_exact(const MixtureParams& truth, const std::vector<Vec>& initializers,
                                 RefineConfig cfg) {
  validate(cfg);
  if (truth.dim() != 1) throw InvalidInput("refine_exact: quadrature oracle needs d = 1");
  cfg.exact_quadrature = true;
  const KnownParams known = KnownParams::from(truth);
  const DerivedStats stats = stats_from(known.weights, known.sigmas, detail::max_norm(initializers));
  MomentSystem system(build_regions(initializers, known, stats), known);
  const VectorEstimate target = system.F_quadrature_at_means(truth.means());
  return detail::run_refinement(system, target, initializers, stats, cfg, truth.means());
}

inline nlohmann::json to_json(const RefineResult& r) {
  nlohmann::json j;
  j["means"] = nlohmann::json::array();
  for (const auto& m : r.means) j["means"].push_back(to_std(m));
  j["solve_report"] = to_json(r.report);
  j["warnings"] = r.warnings;
  j["skipped"] = r.skipped;
  j["iterations_planned"] = r.iterations_planned;
  j["eps0"] = r.eps0;
  j["eta_target"] = r.eta_target;
  j["eta_b"] = r.target.tolerance;
  j["region_hits"] = r.region_hits;
  j["errors_vs_truth"] = r.errors_vs_truth;
  return j;
}

}  // namespace sgmix
