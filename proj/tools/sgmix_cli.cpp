#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgmix/harness.hpp"

namespace fs = std::filesystem;
using namespace sgmix;

namespace {

constexpr int kValidation = 2;
constexpr int kStage = 3;

struct Common {
  std::string out = ".";
  std::uint64_t seed = 0;
};

std::uint64_t require_seed(const CLI::App* cmd, const Common& c) {
  if (cmd->count("--seed") == 0) throw InvalidInput(cmd->get_name() + ": --seed is required");
  return c.seed;
}

std::string out_path(const Common& c, const std::string& file) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / file).string();
}

MixtureParams mixture_or_generator(const std::string& file, const GeneratorSpec& spec, std::uint64_t seed) {
  return file.empty() ? generate_mixture(spec, seed) : read_mixture(file);
}

void add_generator_flags(CLI::App* cmd, GeneratorSpec& g) {
  cmd->add_option("--gen-k", g.k, "generator: number of components");
  cmd->add_option("--gen-d", g.d, "generator: dimension");
  cmd->add_option("--separation", g.separation, "generator: separation multiplier c");
  cmd->add_option("--weights", g.weights, "generator: uniform | random");
  cmd->add_option("--sigmas", g.sigmas, "generator: unit | random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical Gaussian mixture parameter-estimation lab"};
  app.require_subcommand(1);
  Common common;

  const auto with_common = [&](CLI::App* cmd, bool seed = true) {
    cmd->add_option("--out", common.out, "output directory");
    if (seed) cmd->add_option("--seed", common.seed, "master seed");
  };

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw samples from a mixture");
  std::string sample_mixture;
  GeneratorSpec sample_gen;
  Eigen::Index sample_n = 10000;
  sample_cmd->add_option("--mixture", sample_mixture, "mixture JSON (default: generate)");
  sample_cmd->add_option("--n", sample_n, "number of samples");
  add_generator_flags(sample_cmd, sample_gen);
  with_common(sample_cmd);

  // pca
  auto* pca_cmd = app.add_subcommand("pca", "project samples onto the top-k singular subspace");
  std::string pca_samples;
  int pca_k = 0;
  pca_cmd->add_option("--samples", pca_samples, "samples CSV")->required();
  pca_cmd->add_option("--k", pca_k, "number of components")->required();
  with_common(pca_cmd, false);

  // init
  auto* init_cmd = app.add_subcommand("init", "low-dimensional mean initializer");
  std::string init_samples = "generate", init_mixture;
  GeneratorSpec init_gen;
  int init_k = 0;
  double init_spacing = 0.0, init_ball = 0.0, init_eps0 = 0.0;
  Eigen::Index init_n = 100000;
  init_cmd->add_option("--samples", init_samples, "samples CSV, or 'generate'");
  init_cmd->add_option("--mixture", init_mixture, "mixture JSON used to generate samples and the known bounds");
  init_cmd->add_option("--k", init_k, "number of components")->required();
  init_cmd->add_option("--spacing", init_spacing, "net spacing (default: derived)");
  init_cmd->add_option("--ball-radius", init_ball, "estimation ball radius (default: derived)");
  init_cmd->add_option("--eps0", init_eps0, "approximate-maximum gradient threshold");
  init_cmd->add_option("--n", init_n, "samples to generate");
  add_generator_flags(init_cmd, init_gen);
  with_common(init_cmd);

  // refine
  auto* refine_cmd = app.add_subcommand("refine", "Newton refinement of the means");
  std::string refine_mixture, refine_init;
  RefineConfig rcfg;
  Eigen::Index refine_nb = 500000;
  refine_cmd->add_option("--mixture", refine_mixture, "mixture JSON with the true parameters")->required();
  refine_cmd->add_option("--init", refine_init, "initializer JSON (array of means or an init report)")->required();
  refine_cmd->add_option("--delta", rcfg.delta, "target accuracy in sigma units");
  refine_cmd->add_option("--nb", refine_nb, "samples for the target moments");
  refine_cmd->add_option("--nj", rcfg.samples_per_jacobian_component, "Monte Carlo samples per component");
  refine_cmd->add_option("--iterations", rcfg.iterations, "Newton iterations (0: derived)");
  refine_cmd->add_flag("--exact-quadrature", rcfg.exact_quadrature, "noiseless quadrature oracle (d = 1)");
  with_common(refine_cmd);

  // collide
  auto* collide_cmd = app.add_subcommand("collide", "search for far-apart mixtures with matching moments");
  CollisionConfig ccfg;
  collide_cmd->add_option("--mixtures", ccfg.mixtures, "random mean sets");
  collide_cmd->add_option("--k", ccfg.k, "components per set");
  collide_cmd->add_option("--d", ccfg.d, "dimension");
  collide_cmd->add_option("--R", ccfg.R, "highest moment order");
  collide_cmd->add_option("--tv-evaluations", ccfg.tv_evaluations, "pairs whose TV is measured");
  collide_cmd->add_option("--threshold", ccfg.delta_param_threshold, "minimum parameter distance");
  with_common(collide_cmd);

  // tournament
  auto* tour_cmd = app.add_subcommand("tournament", "Scheffe tournament over perturbed candidates");
  std::string tour_mixture;
  GeneratorSpec tour_gen;
  TournamentStageConfig tcfg;
  tour_cmd->add_option("--mixture", tour_mixture, "true mixture JSON (default: generate)");
  tour_cmd->add_option("--candidates", tcfg.candidates, "candidate count");
  tour_cmd->add_option("--delta", tcfg.delta, "accuracy parameter");
  tour_cmd->add_option("--spread", tcfg.spread, "largest decoy mean shift in sigma units");
  tour_cmd->add_option("--m", tcfg.samples, "samples (0: default budget)");
  add_generator_flags(tour_cmd, tour_gen);
  with_common(tour_cmd);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a pipeline from a JSON config");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "experiment config")->required();
  with_common(run_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kValidation;
  }

  try {
    if (*sample_cmd) {
      const std::uint64_t seed = require_seed(sample_cmd, common);
      const MixtureParams mix = mixture_or_generator(sample_mixture, sample_gen, seed);
      const SampleBatch s = sample(mix, sample_n, derive_seed(seed, "cli:sample"));
      write_samples_csv(s, out_path(common, "samples.csv"));
      write_json(mixture_to_json(mix), out_path(common, "mixture.json"));
    } else if (*pca_cmd) {
      const SampleBatch s = read_samples_csv(pca_samples);
      const ProjectionReport rep = reduce(s, pca_k);
      write_singular_values_csv(rep, out_path(common, "singular-values.csv"));
      nlohmann::json basis = nlohmann::json::array();
      for (Eigen::Index c = 0; c < rep.basis.cols(); ++c) basis.push_back(to_std(rep.basis.col(c)));
      write_json({{"reduced_dim", rep.reduced_dim()}, {"basis", basis}, {"singular_values", rep.singular_values}},
                 out_path(common, "pca.json"));
      SampleBatch low;
      low.points = rep.projected_samples;
      write_samples_csv(low, out_path(common, "projected.csv"));
    } else if (*init_cmd) {
      const std::uint64_t seed = require_seed(init_cmd, common);
      SampleBatch s;
      std::optional<MixtureParams> mix;
      if (!init_mixture.empty() || init_samples == "generate") {
        mix = mixture_or_generator(init_mixture, init_gen, seed);
      }
      if (init_samples == "generate") {
        s = sample(*mix, init_n, derive_seed(seed, "cli:init-sample"));
      } else {
        s = read_samples_csv(init_samples);
      }
      InitConfig ic;
      if (mix) {
        ic.bounds = mix->stats();
      } else {
        // Without a mixture file only rho can be read off the data; the
        // aspect bounds default to a balanced unit-sigma mixture.
        double rho = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i) rho = std::max(rho, s.points.row(i).norm());
        ic.bounds = stats_from(std::vector<double>(init_k, 1.0 / init_k), std::vector<double>(init_k, 1.0), rho);
      }
      ic.net = NetConfig::defaults(ic.bounds, s.dim());
      if (init_spacing > 0) ic.net.spacing = init_spacing;
      if (init_ball > 0) ic.net.estimation_ball_radius = init_ball;
      if (init_eps0 > 0) ic.net.eps0 = init_eps0;
      const InitReport rep = initialize(s, init_k, ic);
      write_json(to_json(rep), out_path(common, "init.json"));
      std::cout << rep.k() << " components initialized\n";
    } else if (*refine_cmd) {
      const std::uint64_t seed = require_seed(refine_cmd, common);
      const MixtureParams truth = read_mixture(refine_mixture);
      const std::vector<Vec> init = init_means_from_json(read_json_file(refine_init));
      rcfg.seed = derive_seed(seed, "cli:refine");
      RefineResult r;
      if (rcfg.exact_quadrature) {
        r = refine_exact(truth, init, rcfg);
      } else {
        const SampleBatch s = sample(truth, refine_nb, derive_seed(seed, "cli:refine-sample"));
        r = refine(s, init, KnownParams::from(truth), rcfg, truth.means());
      }
      write_json(to_json(r), out_path(common, "refine.json"));
      write_csv(detail::newton_trace(r), out_path(common, "newton-trace.csv"));
      std::cout << to_string(r.report.status) << '\n';
    } else if (*collide_cmd) {
      ccfg.seed = derive_seed(require_seed(collide_cmd, common), "cli:collide");
      ccfg.distance.seed = derive_seed(ccfg.seed, "cli:collide-tv");
      const CollisionResult r = collision_search(ccfg);
      write_json(to_json(r), out_path(common, "collide.json"));
      Table t{plot_schemas().at("collision"), {}};
      for (size_t i = 0; i < r.evaluated.size(); ++i) {
        const auto& p = r.evaluated[i];
        t.rows.push_back({double(i), p.moment_distance, p.delta_param, p.tv, p.tv_ci});
      }
      write_csv(t, out_path(common, "collision.csv"));
    } else if (*tour_cmd) {
      const std::uint64_t seed = require_seed(tour_cmd, common);
      const MixtureParams truth = mixture_or_generator(tour_mixture, tour_gen, seed);
      TournamentConfig tc;
      int truth_index = -1;
      tc.candidates = detail::tournament_candidates(truth, tcfg.candidates, tcfg.spread, seed, &truth_index);
      tc.delta = tcfg.delta;
      tc.samples = tcfg.samples;
      tc.seed = derive_seed(seed, "cli:tournament-reference");
      const Eigen::Index m = tc.samples > 0 ? tc.samples : tc.default_budget();
      const SampleBatch draws = sample(truth, m, derive_seed(seed, "cli:tournament-draws"));
      const ScheffeResult r = scheffe_select(tc, draws);
      nlohmann::json j = to_json(r);
      j["truth_index"] = truth_index;
      j["winner_tv"] = tv_distance(tc.candidates[r.winner], truth).value;
      write_json(j, out_path(common, "tournament.json"));
    } else if (*run_cmd) {
      std::optional<std::uint64_t> seed;
      if (run_cmd->count("--seed")) seed = common.seed;
      const ExperimentConfig cfg = load_config(config_path, seed);
      const RunRecord rec = run(cfg, common.out);
      std::cout << "config " << rec.config_hash << " -> " << common.out << '\n';
    }
  } catch (const StageFailure& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    if (!e.diagnostics().is_null()) std::cerr << e.diagnostics().dump() << '\n';
    return kStage;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  }
  return 0;
}
