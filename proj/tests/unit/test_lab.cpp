#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "sgmix/core.hpp"
#include "sgmix/lab.hpp"

using namespace sgmix;
constexpr double kPi = std::numbers::pi;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double Phi(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

// Integral of g_a g_b for normalized spherical components:
// (sigma_a^2 + sigma_b^2)^{-d/2} exp(-pi |mu_a - mu_b|^2 / (sigma_a^2 + sigma_b^2)).
double product_integral(const Component& a, const Component& b) {
  const double s2 = a.sigma * a.sigma + b.sigma * b.sigma;
  const double d = static_cast<double>(a.mean.size());
  return std::pow(s2, -d / 2.0) * std::exp(-kPi * (a.mean - b.mean).squaredNorm() / s2);
}

double l2_squared_closed_form(const MixtureParams& f, const MixtureParams& g) {
  double s = 0.0;
  for (const auto& a : f.components())
    for (const auto& b : f.components()) s += a.weight * b.weight * product_integral(a, b);
  for (const auto& a : g.components())
    for (const auto& b : g.components()) s += a.weight * b.weight * product_integral(a, b);
  for (const auto& a : f.components())
    for (const auto& b : g.components()) s -= 2.0 * a.weight * b.weight * product_integral(a, b);
  return s;
}

Mat dense_order2(const SymTensor& t) {
  Mat m(t.dim(), t.dim());
  for (size_t e = 0; e < t.size(); ++e) {
    m(t.index(e)[0], t.index(e)[1]) = t[e];
    m(t.index(e)[1], t.index(e)[0]) = t[e];
  }
  return m;
}

MixtureParams random_mixture_1d(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> mu(-2, 2), sg(0.6, 1.5), w(0.5, 1.5);
  std::vector<Component> comps;
  double total = 0;
  for (int j = 0; j < k; ++j) {
    comps.push_back({w(rng), v1(mu(rng)), sg(rng)});
    total += comps.back().weight;
  }
  for (auto& c : comps) c.weight /= total;
  return MixtureParams(comps);
}

}  // namespace

TEST(MeanMoments, SymmetricPairInOneDimension) {
  const auto m = mean_moments({v1(-1), v1(1)}, 3);
  EXPECT_EQ(m.tensors[0][0], 0.0);
  EXPECT_EQ(m.tensors[1][0], 1.0);
  EXPECT_EQ(m.tensors[2][0], 0.0);
}

TEST(MeanMoments, BasisVectorsGiveHalfIdentity) {
  const auto m = mean_moments({v2(1, 0), v2(0, 1)}, 2);
  const Mat m2 = dense_order2(m.tensors[1]);
  EXPECT_TRUE(m2.isApprox(0.5 * Mat::Identity(2, 2)));
}

TEST(MeanMoments, StoredDimensionIsMultisetCount) {
  const auto m = mean_moments({Vec::Ones(3)}, 4);
  const size_t expected[] = {3, 6, 10, 15};  // C(d + r - 1, r)
  for (int r = 0; r < 4; ++r) EXPECT_EQ(m.tensors[r].size(), expected[r]);
  double mult = 0;
  for (size_t e = 0; e < m.tensors[3].size(); ++e) mult += m.tensors[3].multiplicity(e);
  EXPECT_EQ(mult, 81.0);  // 3^4 full-tensor positions
}

TEST(MeanMoments, PermutationIsBitwiseInvariant) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  std::vector<Vec> means;
  for (int j = 0; j < 7; ++j) means.push_back(Vec::NullaryExpr(3, [&](Eigen::Index) { return n(rng); }));
  auto shuffled = means;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = mean_moments(means, 5), b = mean_moments(shuffled, 5);
  for (int r = 0; r < 5; ++r) {
    const auto& va = a.tensors[r].values();
    const auto& vb = b.tensors[r].values();
    EXPECT_EQ(std::memcmp(va.data(), vb.data(), va.size() * sizeof(double)), 0);
  }
}

TEST(MeanMoments, TranslationShiftsFirstMomentAndExpandsBinomially) {
  const std::vector<Vec> means{v2(0.5, -0.25), v2(1.0, 0.75), v2(-0.125, 0.5), v2(0.25, 0.0)};
  const Vec t = v2(0.5, -1.0);
  std::vector<Vec> moved;
  for (const auto& m : means) moved.push_back(m + t);
  const auto a = mean_moments(means, 1), b = mean_moments(moved, 1);
  EXPECT_EQ(b.tensors[0][0], a.tensors[0][0] + t(0));
  EXPECT_EQ(b.tensors[0][1], a.tensors[0][1] + t(1));

  const std::vector<Vec> line{v1(0.3), v1(-0.7), v1(1.1)};
  const double s = 0.4;
  std::vector<Vec> line_moved;
  for (const auto& m : line) line_moved.push_back(m + v1(s));
  const auto c = mean_moments(line, 3), e = mean_moments(line_moved, 3);
  const double m1 = c.tensors[0][0], m2 = c.tensors[1][0], m3 = c.tensors[2][0];
  EXPECT_NEAR(e.tensors[1][0], m2 + 2 * s * m1 + s * s, 1e-14);
  EXPECT_NEAR(e.tensors[2][0], m3 + 3 * s * m2 + 3 * s * s * m1 + s * s * s, 1e-14);
}

TEST(InjectiveNorm, OrderOneIsEuclideanNorm) {
  const auto m = mean_moments({Vec::LinSpaced(4, 1, 4)}, 1);
  const auto r = injective_norm(m.tensors[0]);
  EXPECT_NEAR(r.value, std::sqrt(30.0), 1e-14);
  EXPECT_TRUE(r.exact);
}

TEST(InjectiveNorm, HalfIdentity) {
  const auto m = mean_moments({v2(1, 0), v2(0, 1)}, 2);
  EXPECT_NEAR(injective_norm(m.tensors[1]).value, 0.5, 1e-12);
}

TEST(InjectiveNorm, OrderTwoMatchesSpectralNorm) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 4;
    SymTensor t(d, 2);
    for (size_t e = 0; e < t.size(); ++e) t[e] = n(rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(dense_order2(t));
    const double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_NEAR(injective_norm(t).value, spectral, 1e-8) << "trial " << trial;
  }
}

TEST(InjectiveNorm, OrderThreeBeatsDenseGrid) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    SymTensor t(2, 3);
    for (size_t e = 0; e < t.size(); ++e) t[e] = n(rng);
    double grid = 0;
    for (int i = 0; i < 20000; ++i) {
      const double th = kPi * i / 20000;
      grid = std::max(grid, std::abs(t.contract(v2(std::cos(th), std::sin(th)))));
    }
    EXPECT_GE(injective_norm(t).value, grid - 1e-9);
    EXPECT_LE(injective_norm(t).value, t.frobenius_norm() + 1e-12);
  }
}

TEST(InjectiveNorm, MoreStartsNeverLower) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    SymTensor t(5, 4);
    for (size_t e = 0; e < t.size(); ++e) t[e] = n(rng);
    double prev = 0;
    for (int starts : {1, 4, 16, 64}) {
      InjectiveNormConfig cfg;
      cfg.starts = starts;
      const double v = injective_norm(t, cfg).value;
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(InjectiveNorm, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  SymTensor t(3, 4);
  for (size_t e = 0; e < t.size(); ++e) t[e] = n(rng);
  Vec y(3);
  y << 0.3, -0.5, 0.8;
  const Vec g = t.contract_all_but_one(y) * 4.0;
  for (int a = 0; a < 3; ++a) {
    Vec yp = y, ym = y;
    yp(a) += 1e-6;
    ym(a) -= 1e-6;
    EXPECT_NEAR(g(a), (t.contract(yp) - t.contract(ym)) / 2e-6, 1e-6);
  }
}

TEST(Distances, IdenticalMixturesAreAtZero) {
  std::mt19937_64 rng(6);
  const auto f = random_mixture_1d(rng, 3);
  EXPECT_LE(l1_distance(f, f).value, 1e-10);
  EXPECT_LE(l2_distance(f, f).value, 1e-10);
  const auto g = MixtureParams({{0.5, v2(0, 0), 1.0}, {0.5, v2(1, 1), 1.2}});
  EXPECT_LE(l1_distance(g, g).value, 1e-10);
}

TEST(Distances, L2MatchesProductIntegralClosedForm) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_mixture_1d(rng, 2), g = random_mixture_1d(rng, 3);
    EXPECT_NEAR(l2_distance(f, g).value, std::sqrt(l2_squared_closed_form(f, g)), 1e-8);
  }
  for (double m : {0.1, 0.5, 2.0}) {
    const MixtureParams a({{1.0, v1(0), 1.0}}), b({{1.0, v1(m), 1.0}});
    // |g_0 - g_m|_2^2 = 2 (1 - exp(-pi m^2 / 2)) / sqrt(2)
    EXPECT_NEAR(l2_distance(a, b).value, std::sqrt(std::sqrt(2.0) * (1 - std::exp(-kPi * m * m / 2))), 1e-8);
  }
  const auto f2 = MixtureParams({{0.4, v2(0, 0), 1.0}, {0.6, v2(1, 0.5), 0.8}});
  const auto g2 = MixtureParams({{0.5, v2(0.2, 0), 1.1}, {0.5, v2(1, 0.3), 0.9}});
  EXPECT_NEAR(l2_distance(f2, g2).value, std::sqrt(l2_squared_closed_form(f2, g2)), 1e-6);
}

TEST(Distances, L1MatchesErfClosedForm) {
  for (double m : {0.01, 0.1, 0.3, 1.0, 2.5}) {
    for (double sigma : {0.7, 1.0, 1.6}) {
      const MixtureParams a({{1.0, v1(0.2), sigma}}), b({{1.0, v1(0.2 + m), sigma}});
      const double closed = 2 * (2 * Phi(m * std::sqrt(2 * kPi) / (2 * sigma)) - 1);
      EXPECT_NEAR(l1_distance(a, b).value, closed, 1e-8) << "m=" << m << " sigma=" << sigma;
    }
  }
}

TEST(Distances, TwoDimensionalL1MatchesProjectedClosedForm) {
  // Equal sigma: |f - g|_1 only depends on the separation along the mean difference.
  const MixtureParams a({{1.0, v2(0, 0), 1.0}}), b({{1.0, v2(0.3, 0.4), 1.0}});
  const double closed = 2 * (2 * Phi(0.5 * std::sqrt(2 * kPi) / 2) - 1);
  EXPECT_NEAR(l1_distance(a, b).value, closed, 1e-6);
}

TEST(Distances, MonteCarloCiCoversQuadrature) {
  std::mt19937_64 rng(8);
  int covered_l1 = 0, covered_l2 = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_mixture_1d(rng, 2), g = random_mixture_1d(rng, 2);
    DistanceConfig mc;
    mc.method = DistanceMethod::MonteCarlo;
    mc.samples = 50000;
    mc.seed = 100 + trial;
    const auto q1 = l1_distance(f, g), e1 = l1_distance(f, g, mc);
    const auto q2 = l2_distance(f, g), e2 = l2_distance(f, g, mc);
    covered_l1 += std::abs(q1.value - e1.value) <= e1.ci_half_width ? 1 : 0;
    covered_l2 += std::abs(q2.value - e2.value) <= e2.ci_half_width ? 1 : 0;
  }
  EXPECT_GE(covered_l1, 18);
  EXPECT_GE(covered_l2, 18);
}

TEST(Distances, MonteCarloCiCoversNearlyDisjointPair) {
  // Overlap mass ~1e-12: no draw lands where the integrand drops below 2.
  const MixtureParams f({{1.0, Vec::Constant(1, 0.0), 1.0}}), g({{1.0, Vec::Constant(1, 6.0), 1.0}});
  const double closed = 2.0 * std::erf(6.0 / (2.0 * std::sqrt(2.0) * std_dev_from_sigma(1.0)));
  DistanceConfig mc;
  mc.method = DistanceMethod::MonteCarlo;
  mc.samples = 20000;
  const auto e = l1_distance(f, g, mc);
  EXPECT_GT(e.ci_half_width, 0.0);
  EXPECT_LE(std::abs(e.value - closed), e.ci_half_width);
  EXPECT_LE(e.ci_half_width, 1e-3);
}

TEST(Distances, L1BoundedByL2OnCoveringBall) {
  // Cauchy-Schwarz on [-gamma, gamma] plus the mass both mixtures leave outside it.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_real_distribution<double> mu(-1, 1);
    const auto f = MixtureParams::standard({v1(mu(rng)), v1(mu(rng)), v1(mu(rng))});
    const auto g = MixtureParams::standard({v1(mu(rng)), v1(mu(rng)), v1(mu(rng))});
    const double gamma = 4.0;
    double outside = 0;
    for (const auto* m : {&f, &g})
      for (const auto& c : m->components()) {
        const double s = std_dev_from_sigma(c.sigma);
        outside += c.weight * (Phi((-gamma - c.mean(0)) / s) + 1 - Phi((gamma - c.mean(0)) / s));
      }
    EXPECT_LE(l1_distance(f, g).value, l2_distance(f, g).value * std::sqrt(2 * gamma) + outside + 1e-10);
  }
}

TEST(Scheffe, TruthInCandidatesPasses) {
  const MixtureParams truth({{0.5, v1(-1), 1.0}, {0.5, v1(1), 1.0}});
  TournamentConfig cfg;
  cfg.candidates = {MixtureParams({{1.0, v1(3), 1.0}}), truth, MixtureParams({{1.0, v1(0), 2.0}})};
  cfg.delta = 0.05;
  const auto draws = sample(truth, cfg.default_budget(), 10);
  const auto r = scheffe_select(cfg, draws);
  EXPECT_EQ(r.winner, 1);
  EXPECT_LE(r.worst_deviation[1], r.threshold);
}

TEST(Scheffe, WinnerWithinFourDelta) {
  const double delta = 0.05;
  for (int seed = 0; seed < 5; ++seed) {
    const MixtureParams truth({{1.0, v1(0), 1.0}});
    TournamentConfig cfg;
    cfg.delta = delta;
    cfg.candidates = {MixtureParams({{1.0, v1(0.6), 1.0}}), MixtureParams({{1.0, v1(0.03), 1.0}}),
                      MixtureParams({{1.0, v1(-0.02), 1.05}})};
    cfg.samples = static_cast<Eigen::Index>(1e4 / (delta * delta));
    const auto draws = sample(truth, cfg.samples, 20 + seed);
    const auto r = scheffe_select(cfg, draws);
    EXPECT_LE(tv_distance(cfg.candidates[r.winner], truth).value, 4 * delta);
  }
}

TEST(Scheffe, SampledReferenceAgreesWithQuadrature) {
  TournamentConfig cfg;
  cfg.candidates = {MixtureParams({{1.0, v1(0), 1.0}}), MixtureParams({{1.0, v1(0.5), 1.3}}),
                    MixtureParams({{0.5, v1(-1), 1.0}, {0.5, v1(1), 1.0}})};
  const auto draws = sample(cfg.candidates[2], 20000, 30);
  const auto exact = scheffe_select(cfg, draws);
  cfg.quadrature_masses = false;
  cfg.reference_samples = 200000;
  const auto sampled = scheffe_select(cfg, draws);
  EXPECT_LE((exact.reference - sampled.reference).cwiseAbs().maxCoeff(), 0.01);
}

TEST(Scheffe, NoPassingCandidateFails) {
  TournamentConfig cfg;
  cfg.candidates = {MixtureParams({{1.0, v1(3), 1.0}}), MixtureParams({{1.0, v1(-3), 1.0}})};
  cfg.delta = 0.01;
  const auto draws = sample(MixtureParams({{1.0, v1(0), 1.0}}), 5000, 31);
  EXPECT_THROW(scheffe_select(cfg, draws), StageFailure);
}

TEST(Collision, MomentEpsMeetsEveryOrder) {
  const std::vector<double> dist{1e-10, 3e-10, 2e-10, 1e-10};
  const double eps = moment_matching_eps(dist);
  ASSERT_TRUE(std::isfinite(eps));
  const double c = 8 * kPi * std::numbers::e;
  for (int r = 1; r <= 4; ++r) {
    const double eps_r = eps * std::pow(r / (c * std::sqrt(std::log(1 / eps))), r);
    EXPECT_LE(dist[r - 1], eps_r * (1 + 1e-9));
  }
  EXPECT_EQ(moment_matching_eps({0.0, 0.0}), std::exp(-700.0));
}

TEST(Collision, IdenticalSetsAreFilteredOut) {
  CollisionConfig cfg;
  cfg.mixtures = 30;
  cfg.R = 4;
  cfg.tv_evaluations = 10;
  auto sets = random_mean_sets(cfg);
  sets.push_back(sets[3]);
  const auto r = collision_search(sets, cfg);
  EXPECT_EQ(r.min_moment_distance, 0.0);
  EXPECT_GE(r.best.delta_param, cfg.delta_param_threshold);
  EXPECT_GT(r.best.moment_distance, 0.0);
  for (const auto& p : r.evaluated) EXPECT_FALSE((p.a == 3 && p.b == 30) || (p.a == 30 && p.b == 3));
}

TEST(Collision, SmallSearchProducesMonotoneSweep) {
  CollisionConfig cfg;
  cfg.mixtures = 300;
  cfg.tv_evaluations = 60;
  cfg.seed = 11;
  const auto r = collision_search(cfg);
  ASSERT_EQ(r.sweep.size(), static_cast<size_t>(cfg.sweep_levels));
  for (size_t l = 1; l < r.sweep.size(); ++l) {
    EXPECT_LT(r.sweep[l].tolerance, r.sweep[l - 1].tolerance);
    EXPECT_LE(r.sweep[l].max_tv, r.sweep[l - 1].max_tv);
  }
  for (const auto& p : r.evaluated) {
    EXPECT_GE(p.tv, 0.0);
    EXPECT_LE(p.tv, 1.0);
    EXPECT_GE(p.delta_param, cfg.delta_param_threshold);
  }
}

TEST(Collision, TwoDimensionalUsesInjectiveNorms) {
  CollisionConfig cfg;
  cfg.d = 2;
  cfg.k = 3;
  cfg.R = 3;
  cfg.mixtures = 40;
  cfg.tv_evaluations = 3;
  cfg.shortlist = 50;
  const auto r = collision_search(cfg);
  const auto a = mean_moments(random_mean_sets(cfg)[r.best.a], 3);
  const auto b = mean_moments(random_mean_sets(cfg)[r.best.b], 3);
  for (int k = 0; k < 3; ++k) {
    const auto diff = a.tensors[k] - b.tensors[k];
    EXPECT_NEAR(r.best.order_distance[k], injective_norm(diff).value, 1e-12);
    EXPECT_LE(r.best.order_distance[k], diff.frobenius_norm() + 1e-12);
  }
}
