#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sgmix/core/errors.hpp"
#include "sgmix/numerics/linalg.hpp"

namespace sgmix {

struct VectorEstimate {
  Eigen::VectorXd value;
  double tolerance = 0.0;          // l_inf accuracy claim
  Eigen::VectorXd standard_error;  // per entry; empty for deterministic evaluations
};

struct MatrixEstimate {
  Eigen::MatrixXd value;
  double tolerance = 0.0;          // inf->inf accuracy claim
  Eigen::MatrixXd standard_error;  // per entry; empty for deterministic evaluations
};

// The iteration index lets stochastic oracles draw fresh samples every step.
struct SystemOracle {
  std::function<VectorEstimate(const Eigen::VectorXd&, int)> eval_F;
  std::function<MatrixEstimate(const Eigen::VectorXd&, int)> eval_Fprime;
  VectorEstimate target;
};

struct SolveConfig {
  int max_iterations = 10;
  double stop_tolerance = 1e-8;  // stop once the step l_inf norm is below half of this
  double neighborhood_radius = std::numeric_limits<double>::infinity();
  bool require_dominance = true;
};

enum class SolveStatus { Converged, MaxIterations, SingularJacobian, NotDominant, LeftNeighborhood };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::SingularJacobian: return "singular-jacobian";
    case SolveStatus::NotDominant: return "not-dominant";
    case SolveStatus::LeftNeighborhood: return "left-neighborhood";
  }
  return "unknown";
}

// One entry per Newton step in every per-step list; `initial` holds x^(0).
struct SolveReport {
  Eigen::VectorXd initial;
  std::vector<Eigen::VectorXd> iterates;
  std::vector<double> step_norms;
  std::vector<double> dominance_margins;
  std::vector<double> inverse_norm_bounds;  // Varah 1/alpha, NaN when not dominant
  std::vector<double> inverse_norms;        // explicit |J^-1|_inf, diagnostic only
  std::vector<double> residual_norms;       // |b - F(x^(t))|_inf before the step
  std::vector<double> eta_F;
  std::vector<double> eta_J;
  double eta_b = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  bool converged = false;
  std::string message;

  const Eigen::VectorXd& final_iterate() const { return iterates.empty() ? initial : iterates.back(); }
};

inline SolveReport newton_solve(const SystemOracle& oracle, const Eigen::VectorXd& x0, const SolveConfig& cfg) {
  if (cfg.max_iterations < 1) throw InvalidInput("newton_solve: max_iterations must be >= 1");
  if (!(cfg.stop_tolerance > 0.0)) throw InvalidInput("newton_solve: stop tolerance must be positive");
  if (oracle.target.value.size() != x0.size()) throw InvalidInput("newton_solve: target size mismatch");

  SolveReport rep;
  rep.initial = x0;
  rep.eta_b = oracle.target.tolerance;
  Eigen::VectorXd x = x0;
  for (int t = 0; t < cfg.max_iterations; ++t) {
    const VectorEstimate f = oracle.eval_F(x, t);
    const MatrixEstimate j = oracle.eval_Fprime(x, t);
    const VarahBound vb = varah_inverse_bound(j.value);
    const Eigen::VectorXd residual = oracle.target.value - f.value;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(j.value);
    const double det = lu.determinant();
    if (!std::isfinite(det) || det == 0.0) {
      rep.status = SolveStatus::SingularJacobian;
      rep.message = "Jacobian estimate singular at iteration " + std::to_string(t);
      return rep;
    }
    if (cfg.require_dominance && !vb.dominant()) {
      rep.status = SolveStatus::NotDominant;
      rep.message = "Jacobian estimate not diagonally dominant at iteration " + std::to_string(t) +
                    " (margin " + std::to_string(vb.margin) + ")";
      rep.dominance_margins.push_back(vb.margin);
      return rep;
    }
    const Eigen::VectorXd step = lu.solve(residual);
    x = x + step;

    rep.iterates.push_back(x);
    rep.step_norms.push_back(step.lpNorm<Eigen::Infinity>());
    rep.dominance_margins.push_back(vb.margin);
    rep.inverse_norm_bounds.push_back(vb.bound ? *vb.bound : std::numeric_limits<double>::quiet_NaN());
    rep.inverse_norms.push_back(inf_operator_norm(lu.inverse()));
    rep.residual_norms.push_back(residual.lpNorm<Eigen::Infinity>());
    rep.eta_F.push_back(f.tolerance);
    rep.eta_J.push_back(j.tolerance);

    if ((x - x0).lpNorm<Eigen::Infinity>() > 2.0 * cfg.neighborhood_radius) {
      rep.status = SolveStatus::LeftNeighborhood;
      rep.message = "iterate left the 2*eps0 neighborhood at iteration " + std::to_string(t);
      return rep;
    }
    if (rep.step_norms.back() < cfg.stop_tolerance / 2.0) {
      rep.status = SolveStatus::Converged;
      rep.converged = true;
      return rep;
    }
  }
  rep.status = SolveStatus::MaxIterations;
  return rep;
}

// Right-hand sides of the inexact Newton error recursion for one step: the
// compact form and the expanded form before the last simplification.
struct NewtonErrorBounds {
  double compact = 0.0;
  double expanded = 0.0;
};

inline NewtonErrorBounds newton_error_bounds(double eps, double lipschitz, double inv_norm, double eta_b,
                                             double eta_F, double eta_J, double jac_bound) {
  NewtonErrorBounds out;
  const double quad = eps * eps * lipschitz * inv_norm;
  out.compact = quad + inv_norm * (eta_b + eta_F + 4.0 * eta_J * eps * inv_norm * jac_bound);
  out.expanded =
      quad + inv_norm * (eta_b + eta_F) + 2.0 * eta_J * inv_norm * inv_norm * (eta_b + eta_F + jac_bound * eps);
  return out;
}

inline nlohmann::json to_json(const SolveReport& r) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["initial"] = vec(r.initial);
  j["iterates"] = nlohmann::json::array();
  for (const auto& x : r.iterates) j["iterates"].push_back(vec(x));
  j["step_norms"] = r.step_norms;
  j["dominance_margins"] = r.dominance_margins;
  nlohmann::json inv = nlohmann::json::array();
  for (double v : r.inverse_norm_bounds) inv.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
  j["inverse_norm_bounds"] = inv;
  j["inverse_norms"] = r.inverse_norms;
  j["residual_norms"] = r.residual_norms;
  j["eta_b"] = r.eta_b;
  j["eta_F"] = r.eta_F;
  j["eta_J"] = r.eta_J;
  j["status"] = to_string(r.status);
  j["converged"] = r.converged;
  j["message"] = r.message;
  return j;
}

}  // namespace sgmix
