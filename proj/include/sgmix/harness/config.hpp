#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core/mixture_io.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/harness/generate.hpp"

namespace sgmix {

struct InitStageConfig {
  std::string source = "perturbed";  // perturbed | net
  double perturbation = 0.02;        // in units of sigma_j
  double spacing = 0.05;
  double ball_radius = 0.3;
  double eps0 = 0.5;
};

struct RefineStageConfig {
  double delta = 1e-3;
  Eigen::Index nj = 200000;
  int iterations = 0;
  bool exact_quadrature = false;
};

struct CollideStageConfig {
  int mixtures = 2000, k = 4, d = 1, R = 6, tv_evaluations = 300;
  double threshold = 0.1;
};

struct TournamentStageConfig {
  int candidates = 20;
  double delta = 0.05;
  double spread = 1.0;  // largest mean perturbation among the decoys, in sigma units
  Eigen::Index samples = 0;
};

struct ExperimentConfig {
  std::string pipeline;
  std::uint64_t seed = 0;
  std::optional<std::string> mixture_file;
  std::optional<GeneratorSpec> generator;
  Eigen::Index samples = 100000;
  bool persist_samples = true;
  InitStageConfig init;
  RefineStageConfig refine;
  std::vector<double> separations;
  CollideStageConfig collide;
  TournamentStageConfig tournament;
  bool record_timings = false;
  nlohmann::json source;  // the validated document, seed included

  // FNV-1a over the canonical config text, plus the referenced mixture file.
  std::string hash() const {
    std::uint64_t h = fnv1a(source.dump());
    if (mixture_file) {
      std::ifstream in(*mixture_file);
      const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      h = fnv1a(text, h);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

inline const std::set<std::string>& known_pipelines() {
  static const std::set<std::string> p{"full", "refine-only", "separation-sweep", "collide", "tournament"};
  return p;
}

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput(std::string("config: field '") + key + "' has the wrong type");
    }
  }
}

}  // namespace detail

// Seeds must be explicit: a config without "seed" is rejected unless the
// caller supplies one (the CLI --seed flag).
inline ExperimentConfig parse_config(nlohmann::json j, std::optional<std::uint64_t> seed_override = std::nullopt,
                                     const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  reject_unknown_fields(j,
                        {"pipeline", "seed", "mixture", "samples", "persist_samples", "init", "refine", "sweep",
                         "collide", "tournament", "record_timings"},
                        "config");
  ExperimentConfig cfg;
  detail::read_opt(j, "pipeline", cfg.pipeline);
  if (!known_pipelines().count(cfg.pipeline)) throw InvalidInput("config: unknown pipeline '" + cfg.pipeline + "'");
  if (seed_override) j["seed"] = *seed_override;
  if (!j.contains("seed")) throw InvalidInput("config: an explicit seed is required");
  detail::read_opt(j, "seed", cfg.seed);
  detail::read_opt(j, "samples", cfg.samples);
  detail::read_opt(j, "persist_samples", cfg.persist_samples);
  detail::read_opt(j, "record_timings", cfg.record_timings);
  if (cfg.samples < 1) throw InvalidInput("config: samples must be positive");

  if (j.contains("mixture")) {
    const auto& m = j.at("mixture");
    reject_unknown_fields(m, {"file", "generator"}, "config.mixture");
    if (m.contains("file") == m.contains("generator")) {
      throw InvalidInput("config.mixture: give exactly one of file or generator");
    }
    if (m.contains("file")) {
      std::filesystem::path p = m.at("file").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      if (!std::filesystem::exists(p)) throw InvalidInput("config.mixture: file not found: " + p.string());
      cfg.mixture_file = p.string();
    } else {
      const auto& g = m.at("generator");
      reject_unknown_fields(g, {"k", "d", "separation", "weights", "sigmas", "weight_spread", "sigma_min", "sigma_max"},
                            "config.mixture.generator");
      GeneratorSpec spec;
      detail::read_opt(g, "k", spec.k);
      detail::read_opt(g, "d", spec.d);
      detail::read_opt(g, "separation", spec.separation);
      detail::read_opt(g, "weights", spec.weights);
      detail::read_opt(g, "sigmas", spec.sigmas);
      detail::read_opt(g, "weight_spread", spec.weight_spread);
      detail::read_opt(g, "sigma_min", spec.sigma_min);
      detail::read_opt(g, "sigma_max", spec.sigma_max);
      spec.validate();
      cfg.generator = spec;
    }
  } else if (cfg.pipeline != "collide") {
    throw InvalidInput("config: pipeline '" + cfg.pipeline + "' needs a mixture");
  }
  if (j.contains("init")) {
    const auto& s = j.at("init");
    reject_unknown_fields(s, {"source", "perturbation", "spacing", "ball_radius", "eps0"}, "config.init");
    detail::read_opt(s, "source", cfg.init.source);
    detail::read_opt(s, "perturbation", cfg.init.perturbation);
    detail::read_opt(s, "spacing", cfg.init.spacing);
    detail::read_opt(s, "ball_radius", cfg.init.ball_radius);
    detail::read_opt(s, "eps0", cfg.init.eps0);
    if (cfg.init.source != "perturbed" && cfg.init.source != "net") {
      throw InvalidInput("config.init: source must be perturbed or net");
    }
  }
  if (j.contains("refine")) {
    const auto& s = j.at("refine");
    reject_unknown_fields(s, {"delta", "nj", "iterations", "exact_quadrature"}, "config.refine");
    detail::read_opt(s, "delta", cfg.refine.delta);
    detail::read_opt(s, "nj", cfg.refine.nj);
    detail::read_opt(s, "iterations", cfg.refine.iterations);
    detail::read_opt(s, "exact_quadrature", cfg.refine.exact_quadrature);
  }
  if (j.contains("sweep")) {
    reject_unknown_fields(j.at("sweep"), {"separations"}, "config.sweep");
    detail::read_opt(j.at("sweep"), "separations", cfg.separations);
  }
  if (cfg.pipeline == "separation-sweep") {
    if (cfg.separations.empty()) throw InvalidInput("config.sweep: separations must be non-empty");
    if (!cfg.generator) throw InvalidInput("config: separation-sweep needs a mixture generator");
  }
  if (j.contains("collide")) {
    const auto& s = j.at("collide");
    reject_unknown_fields(s, {"mixtures", "k", "d", "R", "tv_evaluations", "threshold"}, "config.collide");
    detail::read_opt(s, "mixtures", cfg.collide.mixtures);
    detail::read_opt(s, "k", cfg.collide.k);
    detail::read_opt(s, "d", cfg.collide.d);
    detail::read_opt(s, "R", cfg.collide.R);
    detail::read_opt(s, "tv_evaluations", cfg.collide.tv_evaluations);
    detail::read_opt(s, "threshold", cfg.collide.threshold);
  }
  if (j.contains("tournament")) {
    const auto& s = j.at("tournament");
    reject_unknown_fields(s, {"candidates", "delta", "spread", "samples"}, "config.tournament");
    detail::read_opt(s, "candidates", cfg.tournament.candidates);
    detail::read_opt(s, "delta", cfg.tournament.delta);
    detail::read_opt(s, "spread", cfg.tournament.spread);
    detail::read_opt(s, "samples", cfg.tournament.samples);
    if (cfg.tournament.candidates < 2) throw InvalidInput("config.tournament: need at least two candidates");
  }
  cfg.source = j;
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {}) {
  return parse_config(read_json_file(path), seed_override, std::filesystem::path(path).parent_path());
}

}  // namespace sgmix
