// Acceptance runner: one PASS/FAIL line per criterion. Criteria can be
// selected by name on the command line (e.g. `acceptance AC3 AC7`).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgmix/core.hpp"
#include "sgmix/harness.hpp"
#include "sgmix/init.hpp"
#include "sgmix/lab.hpp"
#include "sgmix/numerics.hpp"
#include "sgmix/pca.hpp"
#include "sgmix/refine.hpp"

using namespace sgmix;
constexpr double kPi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

Vec v1(double a) { return Vec::Constant(1, a); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<Vec> jittered(const MixtureParams& m, double scale, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vec> out;
  for (const auto& c : m.components()) {
    Vec dir(m.dim());
    for (int a = 0; a < m.dim(); ++a) dir(a) = n(rng);
    out.push_back(c.mean + scale * c.sigma * dir.normalized());
  }
  return out;
}

// Offsets of the true means from the region anchors, in sigma units.
Vec true_offsets(const MixtureParams& m, const std::vector<Region>& regions) {
  const int d = m.dim();
  Vec x(m.k() * d);
  for (int j = 0; j < m.k(); ++j) x.segment(j * d, d) = (m[j].mean - regions[j].anchor) / m[j].sigma;
  return x;
}

MixtureParams separated_instance(int k, int d, double c, std::uint64_t seed) {
  GeneratorSpec g;
  g.k = k;
  g.d = d;
  g.separation = c;
  g.weights = "random";
  g.sigmas = "random";
  return generate_mixture(g, seed);
}

// Varah bound with every entry moved against dominance by `z` standard errors.
double worst_case_margin(const MatrixEstimate& j, double z) {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < j.value.rows(); ++r) {
    double row = std::abs(j.value(r, r)) - z * j.standard_error(r, r);
    for (Eigen::Index c = 0; c < j.value.cols(); ++c) {
      if (c != r) row -= std::abs(j.value(r, c)) + z * j.standard_error(r, c);
    }
    margin = std::min(margin, row);
  }
  return margin;
}

// ---------------------------------------------------------------------------

void ac1(Outcome& o) {
  std::vector<Component> comps;
  for (double mu : {-10.0, 0.0, 10.0}) comps.push_back({1.0 / 3, v1(mu), 1.0});
  const MixtureParams m(comps);
  RefineConfig cfg;
  cfg.delta = 1e-10;
  cfg.iterations = 4;
  const std::vector<Vec> init{v1(-9.95), v1(0.05), v1(10.05)};
  const RefineResult r = refine_exact(m, init, cfg);
  const auto& err = r.errors_vs_truth;
  o.check(err.size() >= 2, "no iterations");
  if (err.size() < 2) return;
  o.detail << "errors";
  for (double e : err) o.detail << ' ' << fmt(e);
  o.check(err.back() <= 1e-8 && err.size() <= 5, "max error <= 1e-8 within 4 iterations");

  const MomentSystem sys(r.regions, KnownParams::from(m));
  const Vec xs = true_offsets(m, r.regions);
  const Vec anchors = Vec{{r.regions[0].anchor(0), r.regions[1].anchor(0), r.regions[2].anchor(0)}};
  // Per step: the measured ratio against 1.05 L |J^-1|, and the error against
  // the inexact-Newton recursion whose additive terms are the oracle's stated
  // accuracy. Once an error sits below that accuracy (here: after one step, the
  // map being linear to double precision on the neighborhood) the ratio is
  // rounding noise and only the recursion is meaningful.
  o.detail << "; ratio/bound";
  int above_floor = 0;
  for (size_t t = 0; t + 1 < err.size(); ++t) {
    const Vec xt = t == 0 ? Vec(Vec{{init[0](0), init[1](0), init[2](0)}} - anchors)
                          : Vec(r.report.iterates[t - 1] - anchors);
    // Lipschitz constant of F' on the segment between the iterate and the root.
    double lip = 0.0;
    for (int s = 0; s <= 64; ++s) lip = std::max(lip, sys.Fsecond_norm_quadrature(xt + (xs - xt) * (s / 64.0)));
    const double inv = r.report.inverse_norms[t];
    const double jac = inf_operator_norm(sys.Fprime_quadrature(xt).value);
    const NewtonErrorBounds nb =
        newton_error_bounds(err[t], lip, inv, r.target.tolerance, r.report.eta_F[t], r.report.eta_J[t], jac);
    const double floor = nb.compact - lip * inv * err[t] * err[t];
    const double ratio = err[t + 1] / (err[t] * err[t]);
    const double bound = 1.05 * lip * inv;
    o.detail << ' ' << fmt(ratio) << '/' << fmt(bound);
    if (err[t + 1] > floor) {
      ++above_floor;
      o.check(ratio <= bound, "quadratic ratio at step " + std::to_string(t));
    } else {
      o.detail << " (error " << fmt(err[t + 1]) << " under accuracy floor " << fmt(floor) << ")";
    }
    o.check(err[t + 1] <= 1.05 * nb.compact, "inexact-Newton recursion at step " + std::to_string(t));
  }
  o.detail << "; " << above_floor << " steps above the accuracy floor";
}

void ac2(Outcome& o) {
  int certified = 0, total = 0;
  double worst = 0.0;
  for (int d : {1, 3}) {
    for (int inst = 0; inst < 10; ++inst) {
      const MixtureParams m = separated_instance(2 + inst % 4, d, 4.0, 2000 + 17 * d + inst);
      o.check(separation_audit(m, 4.0).all_pass(), "instance meets the c = 4 condition");
      const KnownParams kn = KnownParams::from(m);
      const auto regions = build_regions(jittered(m, 0.02, 40 + inst), kn, m.stats());
      const MomentSystem sys(regions, kn);
      const Vec xs = true_offsets(m, regions);
      double margin;
      if (d == 1) {
        margin = varah_inverse_bound(sys.Fprime_quadrature(xs).value).margin;
      } else {
        margin = worst_case_margin(sys.Fprime_monte_carlo(xs, {200000, 500u + inst, true}, 0), 3.0);
      }
      const double bound = margin > 0 ? 1.0 / margin : std::numeric_limits<double>::infinity();
      worst = std::max(worst, bound);
      ++total;
      certified += bound <= 4.0;
    }
  }
  o.detail << certified << "/" << total << " certified, largest inverse-norm bound " << fmt(worst);
  o.check(certified == total, "all instances certified <= 4");
}

void ac3(Outcome& o) {
  // Trials use nested samples: the first half of each draw set serves N_b,
  // the full set 2 N_b, so the scaling comparison shares its randomness.
  const int accuracy_trials = 20, trend_trials = 80;
  int within = 0;
  std::vector<double> final_n, final_2n;
  for (int t = 0; t < trend_trials; ++t) {
    GeneratorSpec g;
    g.k = 8;
    g.d = 3;
    g.separation = 4.0;
    const MixtureParams m = generate_mixture(g, 50 + t);
    const SampleBatch all = sample(m, 1000000, 900 + t);
    SampleBatch half;
    half.points = all.points.topRows(500000);
    const std::vector<Vec> init = jittered(m, 0.02, t);
    RefineConfig cfg;
    cfg.delta = 1e-3;
    cfg.iterations = 6;
    cfg.samples_per_jacobian_component = 200000;
    cfg.seed = 77 + t;
    const RefineResult r1 = refine(half, init, KnownParams::from(m), cfg, m.means());
    const RefineResult r2 = refine(all, init, KnownParams::from(m), cfg, m.means());
    final_n.push_back(r1.errors_vs_truth.back());
    final_2n.push_back(r2.errors_vs_truth.back());
    if (t < accuracy_trials) within += final_n.back() <= 0.02;
  }
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double mn = median(final_n), m2n = median(final_2n);
  const double first20 = median(std::vector<double>(final_n.begin(), final_n.begin() + accuracy_trials));
  o.detail << within << "/" << accuracy_trials << " trials <= 0.02 (median " << fmt(first20) << "); median final error "
           << fmt(mn) << " -> " << fmt(m2n) << " on doubling N_b over " << trend_trials << " trials (ratio "
           << fmt(m2n / mn) << ")";
  o.check(within >= 18, ">= 18/20 trials within 0.02");
  o.check(m2n <= 0.75 * mn, "doubling N_b cuts the median by >= 25%");
}

void ac4(Outcome& o) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  int entries = 0, outside = 0, fd_entries = 0, fd_outside = 0;
  double worst_z = 0.0, worst_fd = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const MixtureParams m = separated_instance(1 + pair % 4, 1, 4.0, 4000 + pair);
    const KnownParams kn = KnownParams::from(m);
    const auto regions = build_regions(jittered(m, 0.02, 4100 + pair), kn, m.stats());
    const MomentSystem sys(regions, kn);
    Vec x = true_offsets(m, regions);
    for (Eigen::Index a = 0; a < x.size(); ++a) x(a) += jitter(rng);
    const MonteCarloConfig mc{200000, 4200u + pair, pair % 2 == 0};
    const VectorEstimate fq = sys.F_quadrature(x), fm = sys.F_monte_carlo(x, mc, 0);
    const MatrixEstimate jq = sys.Fprime_quadrature(x), jm = sys.Fprime_monte_carlo(x, mc, 0);
    for (Eigen::Index a = 0; a < x.size(); ++a) {
      const double z = std::abs(fm.value(a) - fq.value(a)) / std::hypot(fm.standard_error(a), fq.tolerance / 3);
      worst_z = std::max(worst_z, z);
      ++entries;
      outside += z > 4.0;
      for (Eigen::Index b = 0; b < x.size(); ++b) {
        const double zj =
            std::abs(jm.value(a, b) - jq.value(a, b)) / std::hypot(jm.standard_error(a, b), jq.tolerance / 3);
        worst_z = std::max(worst_z, zj);
        ++entries;
        outside += zj > 4.0;
      }
    }
    // Central differences of the Monte Carlo map under common random numbers,
    // replicated over independent seeds to get their standard error. The
    // truncation error of the difference quotient is measured on quadrature.
    const double h = 1e-3;
    const int reps = 8;
    const int n = static_cast<int>(x.size());
    std::vector<Mat> fds;
    for (int rep = 0; rep < reps; ++rep) {
      const MonteCarloConfig mr{200000, 9000u + 100u * pair + rep, pair % 2 == 0};
      fds.push_back(finite_diff_jacobian([&](const Vec& y) { return sys.F_monte_carlo(y, mr, 0).value; }, x, h));
    }
    const Mat fd_quad = finite_diff_jacobian([&](const Vec& y) { return sys.F_quadrature(y).value; }, x, h);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double mean = 0.0, var = 0.0;
        for (const auto& f : fds) mean += f(a, b) / reps;
        for (const auto& f : fds) var += (f(a, b) - mean) * (f(a, b) - mean) / (reps - 1);
        const double se = std::sqrt(var / reps);
        const double trunc = std::abs(fd_quad(a, b) - jq.value(a, b)) + jq.tolerance;
        const double tol = 4.0 * std::hypot(se, jm.standard_error(a, b)) + trunc;
        const double dev = std::abs(mean - jm.value(a, b));
        worst_fd = std::max(worst_fd, tol > 0 ? dev / tol : 0.0);
        ++fd_entries;
        fd_outside += dev > tol;
      }
    }
  }
  o.detail << outside << "/" << entries << " MC-vs-quadrature entries beyond 4 SE (max " << fmt(worst_z)
           << " SE); " << fd_outside << "/" << fd_entries << " finite-difference entries beyond tolerance (max "
           << fmt(worst_fd) << " of tolerance)";
  o.check(outside == 0, "Monte Carlo agrees with quadrature");
  o.check(fd_outside == 0, "Jacobian agrees with finite differences");
}

void ac5(Outcome& o) {
  int regions_ok = 0, regions_total = 0;
  double min_own_slack = 1e300, min_cross_slack = 1e300;
  for (int d : {1, 2, 3}) {
    for (int inst = 0; inst < 10; ++inst) {
      const MixtureParams m = separated_instance(2 + inst % 3, d, 4.0, 5000 + 31 * d + inst);
      const auto regions = build_regions(jittered(m, 0.02, 5100 + inst), KnownParams::from(m), m.stats());
      for (const auto& r : leakage_report(m, regions, 400000, 5200 + inst)) {
        ++regions_total;
        regions_ok += r.own_ok && r.cross_ok;
        min_own_slack = std::min(min_own_slack, r.own_mass - 3 * r.own_mass_se - r.own_threshold);
        min_cross_slack = std::min(min_cross_slack, r.cross_threshold - r.cross_mass - 3 * r.cross_mass_se);
      }
    }
  }
  o.detail << regions_ok << "/" << regions_total << " regions pass (smallest own-mass slack " << fmt(min_own_slack)
           << ", cross-mass slack " << fmt(min_cross_slack) << ")";
  o.check(regions_ok == regions_total, "all regions meet both leakage inequalities");
}

void ac6(Outcome& o) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> radius(2.5, 5.0), wt(1.0, 1.5);
  int within = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Component> comps;
    double total = 0.0;
    for (int j = 0; j < 6; ++j) {
      Vec dir(64);
      for (int a = 0; a < 64; ++a) dir(a) = n(rng);
      comps.push_back({wt(rng), radius(rng) * dir.normalized(), 1.0});
      total += comps.back().weight;
    }
    for (auto& c : comps) c.weight /= total;
    const MixtureParams m(comps);
    o.check(m.stats().w_min >= 0.1, "w_min >= 0.1");
    const ProjectionReport rep = reduce(sample(m, 200000, 6000 + trial), 6);
    double err = 0.0;
    for (const auto& c : m.components()) err = std::max(err, (lift(rep, project(rep, c.mean)) - c.mean).norm());
    worst = std::max(worst, err);
    within += err <= 0.05;
  }
  o.detail << within << "/20 trials within 0.05 (largest " << fmt(worst) << ")";
  o.check(within >= 18, ">= 18/20 trials");
}

void ac7(Outcome& o) {
  std::vector<Vec> means;
  for (double a : {-8.5, 8.5})
    for (double b : {-8.5, 8.5}) means.push_back(Vec{{a, b}});
  const MixtureParams m = MixtureParams::standard(means);
  o.check(separation_audit(m, 6.0).all_pass(), "instance meets the c = 6 condition");
  const DerivedStats s = m.stats();

  InitConfig cfg;
  cfg.bounds = s;
  cfg.net = NetConfig::defaults(s, 2);
  cfg.net.eps0 = 0.5;
  cfg.net.spacing = 0.05;
  cfg.net.estimation_ball_radius = 0.3;
  const InitReport rep = initialize(sample(m, 1000000, 7000), 4, cfg);
  o.check(rep.k() == 4, "exactly 4 clusters");
  double mean_err = 0, sigma_err = 0, weight_err = 0;
  if (rep.k() == 4) {
    for (int c = 0; c < 4; ++c) {
      int best = 0;
      for (int j = 1; j < 4; ++j)
        if ((rep.means[c] - m[j].mean).norm() < (rep.means[c] - m[best].mean).norm()) best = j;
      mean_err = std::max(mean_err, (rep.means[c] - m[best].mean).norm());
      sigma_err = std::max(sigma_err, std::abs(rep.sigmas[c] - m[best].sigma) / m[best].sigma);
      weight_err = std::max(weight_err, std::abs(rep.weights[c] - m[best].weight));
    }
  }
  o.detail << rep.k() << " clusters, mean error " << fmt(mean_err) << ", sigma error " << fmt(sigma_err)
           << ", weight error " << fmt(weight_err);
  o.check(mean_err <= 0.1 && sigma_err <= 0.05 && weight_err <= 0.02, "sampled estimates within tolerance");

  // Exact oracle with the unscaled thresholds: every net point is classified.
  const double eps0 = std::exp(-2.0 * 2);
  const auto thresholds = ApproxMaxThresholds::from(s, 2, eps0);
  const auto oracle = exact_oracle(m);
  const auto nearest = [&](const Vec& x) {
    double best = 1e300;
    for (const auto& c : m.components()) best = std::min(best, (x - c.mean).norm());
    return best;
  };
  const double sound_radius = eps0 * std::sqrt(2.0) * s.sigma_min;
  NetConfig global = NetConfig::defaults(s, 2);
  global.spacing = 0.05;
  std::vector<RowMat> nets{build_net(global, 2)};
  for (const auto& c : m.components()) {
    NetConfig local;
    local.center = c.mean;
    local.radius = 1.2 * std::sqrt(2.0 / kPi) * c.sigma;
    local.spacing = 0.005;
    nets.push_back(build_net(local, 2));
  }
  long scanned = 0, accepted = 0, unsound = 0;
  for (const auto& net : nets) {
    const auto est = oracle(net);
    for (Eigen::Index p = 0; p < net.rows(); ++p) {
      ++scanned;
      const auto c = classify_point(net.row(p).transpose(), est[p], thresholds);
      if (!c.accepted()) continue;
      ++accepted;
      unsound += nearest(c.point) > sound_radius;
    }
  }
  const double eps_prime = eps0 * s.sigma_min / (32.0 * s.sigma_max);
  long complete_points = 0, incomplete = 0;
  for (const auto& c : m.components()) {
    NetConfig local;
    local.center = c.mean;
    local.radius = eps_prime * std::sqrt(2.0) / 32.0 * c.sigma * c.sigma / s.sigma_max;
    local.spacing = local.radius / 8.0;
    const RowMat net = build_net(local, 2);
    const auto est = oracle(net);
    for (Eigen::Index p = 0; p < net.rows(); ++p) {
      ++complete_points;
      incomplete += !classify_point(net.row(p).transpose(), est[p], thresholds).accepted();
    }
  }
  o.detail << "; exact oracle: " << scanned << " net points, " << accepted << " accepted, " << unsound
           << " unsound; " << incomplete << "/" << complete_points << " near-mean points rejected";
  o.check(unsound == 0 && accepted >= 4, "soundness");
  o.check(incomplete == 0, "completeness");
}

void ac8(Outcome& o) {
  const double c1 = ball_mass_constant(1);
  const double identity = std::erf(1.0 / std::sqrt(2.0));
  o.detail << "c_1 = " << std::setprecision(10) << c1 << ", one-sigma mass " << identity;
  o.check(std::abs(c1 - 0.682689) <= 1e-6, "c_1 = 0.682689 +- 1e-6");
  o.check(std::abs(c1 - identity) <= 1e-9, "matches the one-sigma normal mass");
}

void ac9(Outcome& o) {
  int good = 0;
  double worst = 0.0;
  Eigen::Index m_used = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const MixtureParams truth = separated_instance(2 + trial % 2, 1, 2.0, 9000 + trial);
    TournamentConfig tc;
    int truth_index = -1;
    tc.candidates = detail::tournament_candidates(truth, 20, 1.0, 9100 + trial, &truth_index);
    tc.delta = 0.05;
    tc.seed = 9200 + trial;
    m_used = tc.default_budget();
    const ScheffeResult r = scheffe_select(tc, sample(truth, m_used, 9300 + trial));
    DistanceConfig dc;
    dc.method = DistanceMethod::Quadrature;
    const double tv = tv_distance(tc.candidates[r.winner], truth, dc).value;
    worst = std::max(worst, tv);
    good += tv <= 0.2;
  }
  o.detail << good << "/20 winners within TV 0.2 (largest " << fmt(worst) << ", m = " << m_used << ")";
  o.check(good == 20, "20/20 trials");
}

void ac10(Outcome& o) {
  CollisionConfig cfg;
  cfg.seed = 10;
  const CollisionResult r = collision_search(cfg);
  o.detail << "best pair: param distance " << fmt(r.best.delta_param) << ", TV " << fmt(r.best.tv) << " +- "
           << fmt(r.best.tv_ci) << ", moment distance " << fmt(r.best.moment_distance) << "; sweep max TV";
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  int levels = 0;
  for (const auto& l : r.sweep) {
    if (l.pairs == 0) continue;
    ++levels;
    o.detail << ' ' << fmt(l.max_tv);
    monotone = monotone && l.max_tv <= prev;
    prev = l.max_tv;
  }
  o.check(r.best.delta_param >= 0.1, "param distance >= 0.1");
  o.check(r.best.tv <= 1e-2, "TV <= 1e-2");
  o.check(levels >= 3, "at least three populated sweep levels");
  o.check(monotone, "TV decreases as the moment tolerance shrinks");
}

void ac11(Outcome& o) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3), sg(0.5, 2.0);
  double worst_quad = 0.0;
  int mc_inside = 0;
  for (int c = 0; c < 20; ++c) {
    const int d = 1 + c % 2;
    const double sigma = sg(rng);
    Vec a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a(i) = u(rng);
      b(i) = u(rng);
    }
    const MixtureParams f({{1.0, a, sigma}}), g({{1.0, b, sigma}});
    const double closed = 2.0 * std::erf((a - b).norm() / (2.0 * std::sqrt(2.0) * std_dev_from_sigma(sigma)));
    DistanceConfig q;
    q.method = DistanceMethod::Quadrature;
    worst_quad = std::max(worst_quad, std::abs(l1_distance(f, g, q).value - closed));
    DistanceConfig mc;
    mc.method = DistanceMethod::MonteCarlo;
    mc.seed = 1100 + c;
    const DistanceEstimate e = l1_distance(f, g, mc);
    mc_inside += std::abs(e.value - closed) <= e.ci_half_width;
  }
  int pinsker_ok = 0;
  double tightest = 1e300;
  for (int c = 0; c < 100; ++c) {
    const int d = 1 + c % 2;
    Vec a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a(i) = 0.5 * u(rng);
      b(i) = 0.5 * u(rng);
    }
    const Component p{1.0, a, sg(rng)}, q{1.0, b, sg(rng)};
    DistanceConfig dq;
    dq.method = DistanceMethod::Quadrature;
    const double tv = tv_distance(MixtureParams({p}), MixtureParams({q}), dq).value;
    const double bound = tv_upper_bound_pinsker(p, q);
    tightest = std::min(tightest, bound - tv);
    pinsker_ok += bound >= tv;
  }
  o.detail << "quadrature L1 max deviation " << fmt(worst_quad) << "; " << mc_inside
           << "/20 Monte Carlo CIs cover the closed form; Pinsker holds on " << pinsker_ok
           << "/100 (smallest slack " << fmt(tightest) << ")";
  o.check(worst_quad <= 1e-8, "quadrature within 1e-8");
  o.check(mc_inside == 20, "Monte Carlo within CI on 20 cases");
  o.check(pinsker_ok == 100, "Pinsker bound dominates TV");
}

struct Criterion {
  std::string name;
  double budget_seconds;  // 0: no runtime bound
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"AC1", 10, ac1}, {"AC2", 120, ac2}, {"AC3", 600, ac3},  {"AC4", 0, ac4},
      {"AC5", 0, ac5},  {"AC6", 60, ac6},  {"AC7", 300, ac7},  {"AC8", 0, ac8},
      {"AC9", 120, ac9}, {"AC10", 300, ac10}, {"AC11", 0, ac11},
  };
  const std::set<std::string> wanted(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.name)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0) o.check(secs < c.budget_seconds, "runtime budget " + fmt(c.budget_seconds) + " s");
    std::cout << c.name << (o.pass ? " PASS " : " FAIL ") << o.detail.str() << " (" << fmt(secs) << " s)"
              << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
