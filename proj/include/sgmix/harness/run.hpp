#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core.hpp"
#include "sgmix/harness/config.hpp"
#include "sgmix/harness/generate.hpp"
#include "sgmix/harness/record.hpp"
#include "sgmix/harness/samples_io.hpp"
#include "sgmix/init.hpp"
#include "sgmix/lab.hpp"
#include "sgmix/pca.hpp"
#include "sgmix/refine.hpp"

namespace sgmix {

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << j.dump(2) << '\n';
}

// Truth means moved by `scale` sigma_j in a random direction each.
inline std::vector<Vec> perturbed_means(const MixtureParams& truth, double scale, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "harness:perturb", 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> out;
  for (const auto& c : truth.components()) {
    Vec dir(truth.dim());
    for (int a = 0; a < truth.dim(); ++a) dir(a) = normal(rng);
    out.push_back(c.mean + scale * c.sigma * dir / dir.norm());
  }
  return out;
}

inline std::vector<double> per_mean_errors(const MixtureParams& truth, const std::vector<Vec>& means) {
  std::vector<double> e;
  for (int j = 0; j < truth.k(); ++j) e.push_back((means[j] - truth[j].mean).norm() / truth[j].sigma);
  return e;
}

inline MixtureParams with_means(const MixtureParams& truth, const std::vector<Vec>& means) {
  std::vector<Component> comps = truth.components();
  for (size_t j = 0; j < comps.size(); ++j) comps[j].mean = means[j];
  return MixtureParams(comps);
}

namespace detail {

class RunContext {
 public:
  RunContext(const ExperimentConfig& cfg, std::string dir) : cfg_(cfg), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    rec_.config_hash = cfg.hash();
    rec_.pipeline = cfg.pipeline;
    rec_.seed = cfg.seed;
  }

  template <class Fn>
  auto stage(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    StageRecord st;
    st.name = name;
    current_ = &st;
    auto finish = [&] {
      if (cfg_.record_timings) {
        st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
      rec_.stages.push_back(st);
      current_ = nullptr;
    };
    try {
      auto out = fn();
      finish();
      return out;
    } catch (const StageFailure& e) {
      finish();
      rec_.metrics["failure"] = {{"stage", name}, {"message", e.what()}, {"diagnostics", e.diagnostics()}};
      save();
      throw;
    }
  }

  std::string out(const std::string& file) {
    const std::string p = dir_ + "/" + file;
    if (current_) current_->outputs.push_back(file);
    return p;
  }

  void stream(const std::string& name) {
    if (std::find(rec_.substreams.begin(), rec_.substreams.end(), name) == rec_.substreams.end()) {
      rec_.substreams.push_back(name);
    }
  }

  void save() {
    write_json(to_json(rec_), dir_ + "/run_record.json");
    for (const auto& [kind, _] : rec_.tables) emit_plotdata(rec_, kind, dir_);
  }

  RunRecord& record() { return rec_; }
  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  const ExperimentConfig& cfg_;
  std::string dir_;
  RunRecord rec_;
  StageRecord* current_ = nullptr;
};

inline MixtureParams truth_stage(RunContext& ctx, const std::string& file, std::uint64_t seed,
                                 std::optional<GeneratorSpec> spec = std::nullopt) {
  return ctx.stage("mixture", [&] {
    const auto& cfg = ctx.cfg();
    MixtureParams mix;
    if (!spec) spec = cfg.generator;
    if (spec) {
      ctx.stream("harness:generate");
      mix = generate_mixture(*spec, seed);
    } else {
      mix = read_mixture(*cfg.mixture_file);
    }
    write_json(mixture_to_json(mix), ctx.out(file));
    return mix;
  });
}

inline SampleBatch sample_stage(RunContext& ctx, const MixtureParams& mix, const std::string& file,
                                std::uint64_t seed) {
  return ctx.stage("sample", [&] {
    ctx.stream("sample:mixture");
    SampleBatch s = sample(mix, ctx.cfg().samples, derive_seed(seed, "harness:sample"));
    if (ctx.cfg().persist_samples) write_samples_csv(s, ctx.out(file));
    return s;
  });
}

inline Table newton_trace(const RefineResult& r) {
  Table t{plot_schemas().at("newton-trace"), {}};
  for (size_t i = 0; i < r.errors_vs_truth.size(); ++i) {
    const double margin = i < r.report.dominance_margins.size() ? r.report.dominance_margins[i]
                                                                 : std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({static_cast<double>(i), r.errors_vs_truth[i], margin});
  }
  return t;
}

inline RefineConfig refine_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  RefineConfig rc;
  rc.delta = cfg.refine.delta;
  rc.samples_per_jacobian_component = cfg.refine.nj;
  rc.iterations = cfg.refine.iterations;
  rc.exact_quadrature = cfg.refine.exact_quadrature;
  rc.seed = derive_seed(seed, "harness:refine");
  return rc;
}

// Refinement from the given initializers; sampled unless exact quadrature is requested.
inline RefineResult refine_stage(RunContext& ctx, const MixtureParams& truth, const std::vector<Vec>& init,
                                 const SampleBatch* samples, std::uint64_t seed, const std::string& file) {
  return ctx.stage("refine", [&] {
    const RefineConfig rc = refine_config(ctx.cfg(), seed);
    RefineResult r;
    if (rc.exact_quadrature) {
      r = refine_exact(truth, init, rc);
    } else {
      ctx.stream("refine:F");
      ctx.stream("refine:J");
      r = refine(*samples, init, KnownParams::from(truth), rc, truth.means());
    }
    write_json(to_json(r), ctx.out(file));
    return r;
  });
}

inline void refine_metrics(nlohmann::json& m, const MixtureParams& truth, const std::vector<Vec>& init,
                           const RefineResult& r) {
  const auto errs = per_mean_errors(truth, r.means);
  const auto init_errs = per_mean_errors(truth, init);
  m["per_mean_errors"] = errs;
  m["max_error"] = *std::max_element(errs.begin(), errs.end());
  m["initial_max_error"] = *std::max_element(init_errs.begin(), init_errs.end());
  m["delta_param"] = param_distance(with_means(truth, r.means), truth).value;
  m["converged"] = r.report.converged;
  m["status"] = to_string(r.report.status);
}

inline void run_full(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto& rec = ctx.record();
  const MixtureParams truth = truth_stage(ctx, "truth.json", cfg.seed);
  const SampleBatch samples = sample_stage(ctx, truth, "samples.csv", cfg.seed);
  const ProjectionReport proj = ctx.stage("pca", [&] {
    ProjectionReport p = reduce(samples, truth.k());
    nlohmann::json j{{"reduced_dim", p.reduced_dim()}, {"singular_values", p.singular_values}};
    write_json(j, ctx.out("pca.json"));
    return p;
  });
  Table sv{plot_schemas().at("singular-values"), {}};
  for (size_t i = 0; i < proj.singular_values.size(); ++i) sv.rows.push_back({double(i), proj.singular_values[i]});
  rec.tables["singular-values"] = sv;

  const std::vector<Vec> init = ctx.stage("init", [&] {
    std::vector<Vec> means;
    nlohmann::json j;
    if (cfg.init.source == "net") {
      SampleBatch low;
      low.points = proj.projected_samples;
      InitConfig ic;
      // The learner is given the aspect bounds; rho is taken from the reduced truth.
      std::vector<Vec> low_means;
      for (const auto& m : truth.means()) low_means.push_back(project(proj, m));
      double rho_norm = 0.0;
      for (const auto& m : low_means) rho_norm = std::max(rho_norm, m.norm());
      ic.bounds = stats_from(truth.weights(), truth.sigmas(), rho_norm);
      ic.net = NetConfig::defaults(ic.bounds, low.dim());
      ic.net.spacing = cfg.init.spacing;
      ic.net.estimation_ball_radius = cfg.init.ball_radius;
      ic.net.eps0 = cfg.init.eps0;
      const InitReport r = initialize(low, truth.k(), ic);
      for (const auto& m : r.means) means.push_back(lift(proj, m));
      j = to_json(r);
      j["means"] = nlohmann::json::array();
      for (const auto& m : means) j["means"].push_back(to_std(m));
    } else {
      ctx.stream("harness:perturb");
      means = perturbed_means(truth, cfg.init.perturbation, cfg.seed);
      j["means"] = nlohmann::json::array();
      for (const auto& m : means) j["means"].push_back(to_std(m));
    }
    write_json(j, ctx.out("init.json"));
    return means;
  });
  // The refinement matches components by index, so align the initializers to
  // the truth once (the learner's labels are arbitrary).
  const auto perm = param_distance(truth, with_means(truth, init)).permutation;
  std::vector<Vec> aligned(init.size());
  for (size_t j = 0; j < init.size(); ++j) aligned[j] = init[perm[j]];
  const RefineResult r = refine_stage(ctx, truth, aligned, &samples, cfg.seed, "refine.json");
  rec.tables["newton-trace"] = newton_trace(r);
  refine_metrics(rec.metrics, truth, aligned, r);
}

inline void run_refine_only(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto& rec = ctx.record();
  const MixtureParams truth = truth_stage(ctx, "truth.json", cfg.seed);
  std::optional<SampleBatch> samples;
  if (!cfg.refine.exact_quadrature) samples = sample_stage(ctx, truth, "samples.csv", cfg.seed);
  const std::vector<Vec> init = ctx.stage("init", [&] {
    ctx.stream("harness:perturb");
    auto means = perturbed_means(truth, cfg.init.perturbation, cfg.seed);
    nlohmann::json j{{"means", nlohmann::json::array()}};
    for (const auto& m : means) j["means"].push_back(to_std(m));
    write_json(j, ctx.out("init.json"));
    return means;
  });
  const RefineResult r = refine_stage(ctx, truth, init, samples ? &*samples : nullptr, cfg.seed, "refine.json");
  rec.tables["newton-trace"] = newton_trace(r);
  refine_metrics(rec.metrics, truth, init, r);
}

inline void run_separation_sweep(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto& rec = ctx.record();
  Table t{plot_schemas().at("sweep"), {}};
  nlohmann::json per = nlohmann::json::array();
  for (size_t i = 0; i < cfg.separations.size(); ++i) {
    GeneratorSpec spec = *cfg.generator;
    spec.separation = cfg.separations[i];
    const std::uint64_t seed = derive_seed(cfg.seed, "harness:sweep", i);
    const std::string tag = "c" + std::to_string(i);
    const MixtureParams truth = truth_stage(ctx, tag + "_truth.json", seed, spec);
    std::optional<SampleBatch> samples;
    if (!cfg.refine.exact_quadrature) samples = sample_stage(ctx, truth, tag + "_samples.csv", seed);
    const auto init = perturbed_means(truth, cfg.init.perturbation, seed);
    nlohmann::json m;
    try {
      const RefineResult r = refine_stage(ctx, truth, init, samples ? &*samples : nullptr, seed, tag + "_refine.json");
      refine_metrics(m, truth, init, r);
    } catch (const StageFailure& e) {
      // Small multipliers are expected to break the refinement; record and continue.
      rec.metrics.erase("failure");
      const auto errs = per_mean_errors(truth, init);
      m["max_error"] = *std::max_element(errs.begin(), errs.end());
      m["initial_max_error"] = m["max_error"];
      m["converged"] = false;
      m["status"] = std::string("failed: ") + e.what();
    }
    m["separation"] = spec.separation;
    per.push_back(m);
    t.rows.push_back({spec.separation, m["max_error"].get<double>(), m["initial_max_error"].get<double>(),
                      m["converged"].get<bool>() ? 1.0 : 0.0});
  }
  rec.metrics["sweep"] = per;
  rec.tables["sweep"] = t;
}

inline void run_collide(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto& rec = ctx.record();
  const CollisionResult res = ctx.stage("collide", [&] {
    CollisionConfig cc;
    cc.mixtures = cfg.collide.mixtures;
    cc.k = cfg.collide.k;
    cc.d = cfg.collide.d;
    cc.R = cfg.collide.R;
    cc.tv_evaluations = cfg.collide.tv_evaluations;
    cc.delta_param_threshold = cfg.collide.threshold;
    cc.seed = derive_seed(cfg.seed, "harness:collide");
    cc.distance.seed = derive_seed(cfg.seed, "harness:collide-tv");
    ctx.stream("lab:collide-means");
    CollisionResult r = collision_search(cc);
    write_json(to_json(r), ctx.out("collide.json"));
    return r;
  });
  Table t{plot_schemas().at("collision"), {}};
  for (size_t i = 0; i < res.evaluated.size(); ++i) {
    const auto& p = res.evaluated[i];
    t.rows.push_back({double(i), p.moment_distance, p.delta_param, p.tv, p.tv_ci});
  }
  rec.tables["collision"] = t;
  rec.metrics["best"] = to_json(res.best);
  rec.metrics["sweep_max_tv"] = nlohmann::json::array();
  for (const auto& l : res.sweep) rec.metrics["sweep_max_tv"].push_back(l.max_tv);
}

// Candidates: the truth and decoys whose means are moved by growing amounts
// up to `spread` sigma, in a seeded order.
inline std::vector<MixtureParams> tournament_candidates(const MixtureParams& truth, int count, double spread,
                                                        std::uint64_t seed, int* truth_index) {
  std::vector<MixtureParams> cands;
  for (int i = 0; i < count; ++i) {
    const double scale = spread * i / std::max(1, count - 1);
    cands.push_back(i == 0 ? truth : with_means(truth, perturbed_means(truth, scale, derive_seed(seed, "decoy", i))));
  }
  Rng rng(derive_seed(seed, "harness:tournament-order"));
  std::vector<int> order(static_cast<size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<MixtureParams> shuffled;
  for (int i = 0; i < count; ++i) {
    shuffled.push_back(cands[order[i]]);
    if (order[i] == 0) *truth_index = i;
  }
  return shuffled;
}

inline void run_tournament(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto& rec = ctx.record();
  const MixtureParams truth = truth_stage(ctx, "truth.json", cfg.seed);
  const ScheffeResult res = ctx.stage("tournament", [&] {
    TournamentConfig tc;
    int truth_index = -1;
    tc.candidates = tournament_candidates(truth, cfg.tournament.candidates, cfg.tournament.spread, cfg.seed,
                                          &truth_index);
    tc.delta = cfg.tournament.delta;
    tc.samples = cfg.tournament.samples;
    tc.seed = derive_seed(cfg.seed, "harness:tournament-reference");
    const Eigen::Index m = tc.samples > 0 ? tc.samples : tc.default_budget();
    ctx.stream("sample:mixture");
    const SampleBatch draws = sample(truth, m, derive_seed(cfg.seed, "harness:tournament-draws"));
    ScheffeResult r = scheffe_select(tc, draws);
    const auto tv = tv_distance(tc.candidates[r.winner], truth);
    nlohmann::json j = to_json(r);
    j["truth_index"] = truth_index;
    j["winner_tv"] = tv.value;
    write_json(j, ctx.out("tournament.json"));
    rec.metrics["winner"] = r.winner;
    rec.metrics["truth_index"] = truth_index;
    rec.metrics["winner_tv"] = tv.value;
    rec.metrics["samples"] = m;
    return r;
  });
  (void)res;
}

}  // namespace detail

// Executes the configured pipeline, writing every artifact, the plot CSVs and
// run_record.json into out_dir. Stage failures are recorded and rethrown.
inline RunRecord run(const ExperimentConfig& cfg, const std::string& out_dir) {
  detail::RunContext ctx(cfg, out_dir);
  write_json(cfg.source, out_dir + "/config.json");
  if (cfg.pipeline == "full") {
    detail::run_full(ctx);
  } else if (cfg.pipeline == "refine-only") {
    detail::run_refine_only(ctx);
  } else if (cfg.pipeline == "separation-sweep") {
    detail::run_separation_sweep(ctx);
  } else if (cfg.pipeline == "collide") {
    detail::run_collide(ctx);
  } else if (cfg.pipeline == "tournament") {
    detail::run_tournament(ctx);
  } else {
    throw InvalidInput("unknown pipeline '" + cfg.pipeline + "'");
  }
  ctx.save();
  return ctx.record();
}

}  // namespace sgmix
