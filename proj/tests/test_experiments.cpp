#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "disclab/experiments.hpp"

using namespace disclab;

namespace {

TruncationPolicy capped(double M0, double M_max) {
  TruncationPolicy p;
  p.M0 = M0;
  p.M_max = M_max;
  p.eps_rel = 1e-300;  // never satisfied: every run ends at the cap
  return p;
}

ExperimentConfig small_scaling() {
  ExperimentConfig cfg;
  cfg.body = BodySpec::c_sigma(0.75);
  cfg.generator.kind = GeneratorKind::sigma_grid;
  cfg.generator.sigma = 0.75;
  cfg.sizes = {64, 128, 256, 512};
  cfg.engine.policy = capped(4, 8);
  cfg.exponent = grid_exponent(0.75);
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST(FitLogLog, ExactPowerLaws) {
  std::vector<double> n, id, scaled;
  for (double x = 16; x <= 65536; x *= 2) {
    n.push_back(x);
    id.push_back(x);
    scaled.push_back(7.0 * std::pow(x, 0.4));
  }
  const auto a = fit_loglog(n, id);
  EXPECT_NEAR(a.slope, 1.0, 1e-12);
  EXPECT_NEAR(a.intercept, 0.0, 1e-12);
  EXPECT_NEAR(a.r2, 1.0, 1e-12);
  EXPECT_EQ(a.n, n.size());
  const auto b = fit_loglog(n, scaled);
  EXPECT_NEAR(b.slope, 0.4, 1e-12);
  EXPECT_NEAR(b.intercept, std::log(7.0), 1e-12);
  EXPECT_LE(b.ci_lo, b.slope);
  EXPECT_GE(b.ci_hi, b.slope);
}

TEST(FitLogLog, NoisyDataCoversTruth) {
  // Multiplicative noise 1±0.1: the 95% interval covers the true slope in most replicates.
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x, y;
    for (double n = 10; n <= 1e5; n *= 1.5) {
      x.push_back(n);
      y.push_back(3.0 * std::pow(n, 0.45) * noise(gen));
    }
    const auto f = fit_loglog(x, y);
    EXPECT_LT(f.ci_lo, f.ci_hi);
    covered += (f.ci_lo <= 0.45 && 0.45 <= f.ci_hi) ? 1 : 0;
  }
  EXPECT_GE(covered, 180);
}

TEST(FitLogLog, RejectsBadRows) {
  EXPECT_THROW(fit_loglog(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(fit_loglog(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 3}), std::invalid_argument);
  EXPECT_THROW(fit_loglog(std::vector<double>{1, -2, 3}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(fit_loglog(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(fit_loglog(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(Exponents, GridExponent) {
  EXPECT_DOUBLE_EQ(grid_exponent(1.0), 0.4);
  EXPECT_DOUBLE_EQ(grid_exponent(0.5), 0.5);
  EXPECT_DOUBLE_EQ(grid_exponent(0.75), 4.0 / 9.0);
  EXPECT_DOUBLE_EQ(grid_exponent(2.0 / 3.0), 6.0 / 13.0);
}

TEST(CellSeed, DeterministicAndDistinct) {
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < 1000; ++i) {
    EXPECT_EQ(cell_seed(5, i), cell_seed(5, i));
    EXPECT_EQ(cell_seed(5, i), CounterRng(5, static_cast<std::uint64_t>(RngStream::experiment)).bits(i));
    seen.insert(cell_seed(5, i));
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(cell_seed(5, 0), cell_seed(6, 0));
}

TEST(Generators, BuildTheNamedFamilies) {
  GeneratorSpec g;
  g.kind = GeneratorKind::sigma_grid;
  g.sigma = 1.0;
  g.j = 1000;
  EXPECT_EQ(generate(g).size(), 945u);
  g.kind = GeneratorKind::square_grid;
  g.j = 50;
  ASSERT_TRUE(generate(g).grid());
  EXPECT_EQ(generate(g).grid()->K, 7u);
  g.kind = GeneratorKind::grid;
  g.K = 3;
  g.L = 5;
  EXPECT_EQ(generate(g).size(), 15u);
  g.kind = GeneratorKind::uniform;
  g.j = 20;
  EXPECT_THROW(generate(g), std::invalid_argument);
  g.seed = 9;
  EXPECT_EQ(generate(g)[3], uniform_points(20, 9)[3]);
  EXPECT_EQ(to_string(g), "kind=uniform,j=20,seed=9");
  g.kind = GeneratorKind::jittered;
  g.j = 17;
  EXPECT_EQ(generate(g).size(), 16u);
  g.kind = GeneratorKind::single;
  g.point = {0.25, 0.5};
  EXPECT_EQ(generate(g).size(), 1u);
  for (auto k : {GeneratorKind::sigma_grid, GeneratorKind::square_grid, GeneratorKind::grid, GeneratorKind::uniform,
                 GeneratorKind::jittered, GeneratorKind::single}) {
    EXPECT_EQ(generator_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(generator_kind_from_string("halton"), std::invalid_argument);
  EXPECT_EQ(engine_kind_from_string("mc"), EngineKind::mc);
  EXPECT_THROW(engine_kind_from_string("exact"), std::invalid_argument);
}

TEST(ScalingExperiment, ReproducibleBitForBit) {
  const auto a = scaling_experiment(small_scaling());
  const auto b = scaling_experiment(small_scaling());
  ASSERT_EQ(a.rows.size(), 4u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].D2, b.rows[i].D2);
    EXPECT_EQ(a.rows[i].N, grid_for_sigma(small_scaling().sizes[i], 0.75).N);
    EXPECT_GT(a.rows[i].D2, 0.0);
    EXPECT_DOUBLE_EQ(a.rows[i].ratio, a.rows[i].D2 / std::pow(a.rows[i].N, a.exponent));
  }
  EXPECT_EQ(a.fit.slope, b.fit.slope);
  EXPECT_EQ(a.pass, std::abs(a.fit.slope - a.exponent) <= a.tolerance);
  EXPECT_LT(a.fit.ci_lo, a.fit.ci_hi);
}

TEST(ScalingExperiment, RandomizedCellsFollowTheSeed) {
  ExperimentConfig cfg;
  cfg.body = BodySpec::disk(0.25);
  cfg.generator.kind = GeneratorKind::uniform;
  cfg.sizes = {8, 16, 32, 64};
  cfg.engine.kind = EngineKind::mc;
  cfg.engine.samples = 2000;
  cfg.seed = 3;
  const auto a = scaling_experiment(cfg), b = scaling_experiment(cfg);
  cfg.seed = 4;
  const auto c = scaling_experiment(cfg);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.rows[i].D2, b.rows[i].D2);
  EXPECT_NE(a.rows[0].D2, c.rows[0].D2);
  EXPECT_NE(a.rows[0].generator.find("seed="), std::string::npos);
}

TEST(ScalingExperiment, ValidatesConfig) {
  ExperimentConfig cfg = small_scaling();
  cfg.sizes = {64, 128, 256};
  EXPECT_THROW(scaling_experiment(cfg), std::invalid_argument);
  cfg.sizes = {64, 128, 128, 256};
  EXPECT_THROW(scaling_experiment(cfg), std::invalid_argument);
  cfg = small_scaling();
  cfg.tolerance = 0;
  EXPECT_THROW(scaling_experiment(cfg), std::invalid_argument);
  cfg = small_scaling();
  cfg.engine.policy.M0 = 1;
  EXPECT_THROW(scaling_experiment(cfg), std::invalid_argument);
}

TEST(EnvelopeCheck, SmallDiskSweep) {
  EnvelopeConfig cfg;
  cfg.body = BodySpec::disk(0.25);
  cfg.exponent = 0.5;
  for (auto k : {GeneratorKind::square_grid, GeneratorKind::uniform, GeneratorKind::jittered}) {
    GeneratorSpec g;
    g.kind = k;
    cfg.generators.push_back(g);
  }
  cfg.sizes = {16, 36, 64};
  cfg.engine.policy = capped(4, 8);
  cfg.seed = 21;
  const auto rep = lower_envelope_check(cfg);
  ASSERT_EQ(rep.rows.size(), 9u);
  ASSERT_EQ(rep.trends.size(), 3u);
  double inf = kInf;
  for (const auto& r : rep.rows) {
    EXPECT_GT(r.D2, 0.0);
    inf = std::min(inf, r.ratio);
  }
  EXPECT_EQ(rep.inf_ratio, inf);
  EXPECT_GT(rep.inf_ratio, 0.0);
  // The envelope is the per-size minimum over generators.
  ASSERT_EQ(rep.envelope.size(), 3u);
  for (std::size_t si = 0; si < 3; ++si) {
    double m = kInf;
    for (std::size_t gi = 0; gi < 3; ++gi) m = std::min(m, rep.rows[gi * 3 + si].ratio);
    EXPECT_EQ(rep.envelope[si].ratio, m);
  }
  EXPECT_EQ(rep.pass, rep.inf_ratio > 0.0 && rep.envelope_trend >= cfg.trend_floor);
  const auto again = lower_envelope_check(cfg);
  EXPECT_EQ(again.inf_ratio, rep.inf_ratio);
  cfg.generators.clear();
  EXPECT_THROW(lower_envelope_check(cfg), std::invalid_argument);
}

TEST(LemmaG, QuadraticLimit) {
  const auto r = lemma_g_roots(0.5 + 1e-9, 0.04);
  EXPECT_NEAR(r.root_pos, 0.2, 1e-6);
  ASSERT_TRUE(r.root_neg);
  EXPECT_NEAR(*r.root_neg, -0.2, 1e-6);
  EXPECT_DOUBLE_EQ(r.predicted_scale, 0.2);
}

TEST(LemmaG, RootsSolveTheEquation) {
  for (double sigma : {0.6, 0.75, 0.9}) {
    for (int e = -20; e <= 20; ++e) {
      const double y = std::ldexp(1.0, e);
      const auto r = lemma_g_roots(sigma, y);
      EXPECT_GT(r.root_pos, 0.0);
      EXPECT_NEAR(lemma_g(sigma, r.root_pos), y, 1e-12 * std::max(1.0, y));
      // The negative branch ends at g(−1) = 1/σ − 1.
      EXPECT_EQ(r.root_neg.has_value(), y <= 1.0 / sigma - 1.0);
      if (r.root_neg) {
        EXPECT_GE(*r.root_neg, -1.0);
        EXPECT_LT(*r.root_neg, 0.0);
        EXPECT_NEAR(lemma_g(sigma, *r.root_neg), y, 1e-12);
      }
    }
  }
}

TEST(LemmaG, ScalingsStayInWindow) {
  const double sigma = 0.75;
  for (int e = -20; e <= 20; ++e) {
    const double y = std::ldexp(1.0, e);
    const auto r = lemma_g_roots(sigma, y);
    EXPECT_DOUBLE_EQ(r.predicted_scale, y <= 1.0 ? std::sqrt(y) : std::pow(y, sigma));
    EXPECT_GE(r.ratio_pos, 0.1);
    EXPECT_LE(r.ratio_pos, 10.0);
    if (r.ratio_neg) {
      EXPECT_GE(*r.ratio_neg, 0.1);
      EXPECT_LE(*r.ratio_neg, 10.0);
    }
  }
  // Small y: g ≈ g''(0)x²/2 with g''(0) = (1/σ)(1/σ − 1).
  const double y = std::ldexp(1.0, -30);
  const double curvature = (1.0 / sigma) * (1.0 / sigma - 1.0);
  EXPECT_NEAR(lemma_g_roots(sigma, y).root_pos / std::sqrt(2.0 * y / curvature), 1.0, 1e-3);
  EXPECT_THROW(lemma_g_roots(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(lemma_g_roots(0.75, 0.0), std::invalid_argument);
}

TEST(ChordAsymptotics, PoleRatioIsTwo) {
  const std::vector<double> phis{0.0};
  const auto deltas = dyadic_grid(-20, -10);
  for (double sigma : {0.5, 2.0 / 3.0, 0.75, 0.9}) {
    const auto rep = chord_asymptotics(sigma, phis, deltas);
    for (const auto& s : rep.samples) EXPECT_NEAR(s.ratio, 2.0, 1e-6) << sigma << " " << s.delta;
    EXPECT_TRUE(rep.pass);
  }
}

TEST(ChordAsymptotics, TiltedRegimeBounded) {
  const std::vector<double> phis{0.1};
  const auto rep = chord_asymptotics(0.75, phis, dyadic_grid(-20, -10));
  EXPECT_EQ(rep.samples.size(), 11u);
  EXPECT_GE(rep.ratio_min, 0.1);
  EXPECT_LE(rep.ratio_max, 10.0);
  EXPECT_TRUE(rep.pass);
  const std::vector<double> sweep{0.0, 1e-3, 1e-2, 0.05, 0.1, 0.2};
  EXPECT_TRUE(chord_asymptotics(0.5, sweep, dyadic_grid(-20, -8)).pass);
  EXPECT_TRUE(chord_asymptotics(0.75, sweep, dyadic_grid(-20, -8)).pass);
}

TEST(ChordAsymptotics, CornerOfCOne) {
  const std::vector<double> phis{0.0, 0.01, 0.05, 0.1, 0.2, 0.24};
  const auto rep = chord_asymptotics(1.0, phis, dyadic_grid(-20, -8));
  EXPECT_TRUE(rep.pass);
  for (const auto& s : rep.samples) {
    if (s.phi == 0.0) {
      EXPECT_DOUBLE_EQ(s.formula, s.delta / std::sqrt(1.0 / 16.0 + 3.0 * s.delta));
    }
  }
}

TEST(ChordAsymptotics, RejectsBadInput) {
  const std::vector<double> ok{0.0}, neg{-0.1};
  const std::vector<double> d{1e-3}, deep{1e3};
  EXPECT_THROW(chord_asymptotics(0.4, ok, d), std::invalid_argument);
  EXPECT_THROW(chord_asymptotics(0.75, neg, d), std::invalid_argument);
  EXPECT_THROW(chord_asymptotics(0.75, ok, deep), std::invalid_argument);
}
