#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "disclab/discrepancy.hpp"

using namespace disclab;

namespace {

TruncationPolicy capped(double M0, double M_max) {
  TruncationPolicy p;
  p.M0 = M0;
  p.M_max = M_max;
  p.eps_rel = 1e-300;  // never satisfied: every run ends at the cap
  return p;
}

PointSet copies(Vec2 t, std::size_t n) { return PointSet(std::vector<Vec2>(n, t)); }

}  // namespace

TEST(CountIn, Examples) {
  const ConvexBody sq = make_body(BodySpec::axis_square(0.5));
  EXPECT_EQ(count_in(sq, 1.0, {0, 0}, PointSet({{0, 0}, {0.4, 0.4}})), 1u);
  for (const auto& spec : {BodySpec::disk(0.25), BodySpec::c_sigma(0.75), BodySpec::c_one(), BodySpec::axis_square(0.5)}) {
    const ConvexBody b = make_body(spec);
    EXPECT_EQ(count_in(b, 0.7, {0.3, 0.6}, copies({0.3, 0.6}, 9)), 9u);
  }
  // Brute force: torus distance to (1/2, 1/2) at most λr = 1/8.
  const ConvexBody disk = make_body(BodySpec::disk(0.25));
  const PointSet g = grid(4, 4);
  std::size_t expected = 0;
  for (const Vec2& p : g.points()) {
    const double dx = wrap_centered(p.x - 0.5), dy = wrap_centered(p.y - 0.5);
    expected += std::hypot(dx, dy) <= 0.125 ? 1 : 0;
  }
  EXPECT_EQ(count_in(disk, 0.5, {0.5, 0.5}, g), expected);
  EXPECT_EQ(expected, 1u);
  EXPECT_THROW(count_in(make_body(BodySpec::disk(0.45)), 1.2, {0, 0}, g), std::domain_error);
}

TEST(CountIn, WrapsAcrossTheTorus) {
  const ConvexBody disk = make_body(BodySpec::disk(0.25));
  EXPECT_EQ(count_in(disk, 1.0, {0.95, 0.95}, PointSet({{0.05, 0.05}})), 1u);
  EXPECT_EQ(count_in(disk, 1.0, {0.95, 0.95}, PointSet({{0.3, 0.3}})), 0u);
}

TEST(McDiscrepancy, SmallDilationsAreSmall) {
  const ConvexBody disk = make_body(BodySpec::disk(0.25));
  const PointSet p = uniform_points(20, 4);
  const auto est = mc_discrepancy(disk, p, {0.0, 0.01}, 2000, 1);
  const double bound = std::pow(20.0 + 20.0 * disk.area(), 2);
  EXPECT_GE(est.value, 0.0);
  EXPECT_LE(est.value, 0.01 * bound);
  EXPECT_LT(est.value, 0.01);
}

TEST(McDiscrepancy, Deterministic) {
  const ConvexBody b = make_body(BodySpec::c_sigma(0.75));
  const PointSet p = uniform_points(16, 3);
  const auto a = mc_discrepancy(b, p, {0, 1}, 5000, 77), c = mc_discrepancy(b, p, {0, 1}, 5000, 77);
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(a.std_error, c.std_error);
  EXPECT_EQ(a.seed, std::optional<std::uint64_t>(77));
  EXPECT_THROW(mc_discrepancy(b, p, {0, 1}, 50, 1), std::invalid_argument);
  EXPECT_THROW(mc_discrepancy(b, p, {0.5, 0.2}, 500, 1), std::domain_error);
}

TEST(EngineAgreement, SquareGrid16) {
  const ConvexBody sq = make_body(BodySpec::axis_square(0.5));
  const PointSet g = grid(16, 16);
  const auto mc = mc_discrepancy(sq, g, {0, 1}, 100000, 2024);
  TruncationPolicy p;
  p.M0 = 4;
  p.M_max = 64;
  const auto pv = parseval_discrepancy(sq, g, {0, 1}, p);
  // Flat edges leave no finite majorant; the truncated sum alone must agree.
  EXPECT_EQ(pv.tail_bound, kInf);
  EXPECT_LE(std::abs(pv.value - mc.value), 3 * mc.std_error)
      << "parseval=" << pv.value << " mc=" << mc.value << " se=" << mc.std_error;
}

TEST(EngineAgreement, SinglePoint) {
  for (const auto& spec : {BodySpec::disk(0.25), BodySpec::c_sigma(0.75)}) {
    const ConvexBody b = make_body(spec);
    const PointSet p({{0.3, 0.6}});
    const auto mc = mc_discrepancy(b, p, {0, 1}, 100000, 5);
    TruncationPolicy pol;
    pol.M_max = 64;
    const auto pv = parseval_discrepancy(b, p, {0, 1}, pol);
    EXPECT_GT(pv.value, 0.0);
    EXPECT_TRUE(std::isfinite(pv.tail_bound));
    EXPECT_LE(std::abs(pv.value - mc.value), 3 * mc.std_error + pv.tail_bound) << to_string(spec);
    EXPECT_LE(std::abs(pv.value - mc.value), 3 * mc.std_error) << to_string(spec);
  }
}

TEST(Parseval, GridPathEqualsDensePath) {
  for (const auto& spec : {BodySpec::disk(0.25), BodySpec::c_sigma(0.75)}) {
    const ConvexBody b = make_body(spec);
    const PointSet g = grid(4, 4);
    const auto sparse = parseval_discrepancy(b, g, {0, 1}, capped(4, 8));  // radius 8·4
    TruncationPolicy dense = capped(16, 32);
    dense.force_dense = true;
    const auto full = parseval_discrepancy(b, g, {0, 1}, dense);
    ASSERT_EQ(sparse.truncation_radius, 32.0);
    ASSERT_EQ(full.truncation_radius, 32.0);
    EXPECT_NEAR(sparse.value / full.value, 1.0, 1e-9) << to_string(spec);
  }
}

TEST(Parseval, PartialSumsNondecreasing) {
  const ConvexBody b = make_body(BodySpec::c_sigma(2.0 / 3.0));
  const auto est = parseval_discrepancy(b, uniform_points(12, 8), {0, 1}, capped(4, 64));
  EXPECT_TRUE(est.flagged);
  double sum = 0.0;
  for (const auto& sh : est.shells) {
    EXPECT_GE(sh.contribution, 0.0);
    EXPECT_GE(sum + sh.contribution, sum);
    sum += sh.contribution;
  }
  EXPECT_NEAR(sum, est.value, 1e-12 * est.value);
  EXPECT_GE(est.tail_bound, 0.0);
}

TEST(Parseval, TranslationInvariance) {
  const ConvexBody b = make_body(BodySpec::disk(0.3));
  const PointSet p = uniform_points(25, 10);
  const auto a = parseval_discrepancy(b, p, {0, 1}, capped(4, 32));
  const auto c = parseval_discrepancy(b, translated(p, {0.37, 0.81}), {0, 1}, capped(4, 32));
  EXPECT_NEAR(c.value / a.value, 1.0, 1e-9);
  const PointSet g = grid(8, 4);
  const auto d = parseval_discrepancy(b, g, {0.5, 1}, capped(4, 8));
  const auto e = parseval_discrepancy(b, translated(g, {0.1, 0.2}), {0.5, 1}, capped(4, 8));
  EXPECT_NEAR(e.value / d.value, 1.0, 1e-9);
}

TEST(Parseval, CacheReusesIntegrals) {
  const ConvexBody b = make_body(BodySpec::c_sigma(0.75));
  detail::IntegralCache cache(b, {0, 1});
  const PointSet p = uniform_points(10, 1);
  const auto a = parseval_discrepancy(b, p, {0, 1}, capped(4, 16), &cache);
  const auto c = parseval_discrepancy(b, p, {0, 1}, capped(4, 16), &cache);
  const auto plain = parseval_discrepancy(b, p, {0, 1}, capped(4, 16));
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(c.spectra, 0u);
  EXPECT_NEAR(a.value / plain.value, 1.0, 1e-12);
  EXPECT_THROW(parseval_discrepancy(b, p, {0.5, 1}, capped(4, 16), &cache), std::invalid_argument);
}

TEST(Parseval, StopRuleEndsBeforeCap) {
  // Flat-free smooth body with a random set: shells decay and the rule fires.
  TruncationPolicy p;
  p.M0 = 4;
  p.eps_rel = 0.05;
  p.M_max = 1e4;
  const auto est = parseval_discrepancy(make_body(BodySpec::disk(0.25)), uniform_points(8, 2), {0, 1}, p);
  EXPECT_FALSE(est.flagged);
  EXPECT_LT(est.truncation_radius, 1e4);
}

TEST(Parseval, DenseUnitsScaleWithPointSpacing) {
  const ConvexBody body = make_body(BodySpec::disk(0.25));
  const PointSet P = uniform_points(16, 3);
  TruncationPolicy p = capped(4, 8);
  EXPECT_EQ(parseval_discrepancy(body, P, {0, 1}, p).truncation_radius, 8.0);
  p.dense_units = DenseUnits::sqrt_n;
  // ceil(sqrt(16)) = 4
  EXPECT_EQ(parseval_discrepancy(body, P, {0, 1}, p).truncation_radius, 32.0);
}

TEST(TruncationPolicy, Validation) {
  TruncationPolicy p;
  p.M0 = 2;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.window = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.eps_rel = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.growth = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_NO_THROW(TruncationPolicy{}.validate());
}

TEST(Cassels, CopiesOfOnePoint) {
  const std::size_t n = 12;
  const auto rep = cassels_check(copies({0.2, 0.9}, n), 4.0 * std::sqrt(12.0), 2.0);
  EXPECT_NEAR(rep.lhs, static_cast<double>(n * n * rep.lattice_points), 1e-6 * rep.lhs);
  EXPECT_EQ(rep.inner_points, 13u);
  EXPECT_TRUE(rep.pass);
}

TEST(Cassels, GridClosedForm) {
  for (auto [K, L] : {std::pair<std::size_t, std::size_t>{4, 4}, {6, 3}, {10, 7}}) {
    const double R = 3.0 * std::sqrt(static_cast<double>(K * L));
    const auto rep = cassels_check(grid(K, L), R, 2.0);
    // |S(m)|² = (KL)² on KZ×LZ: count those lattice points in the annulus.
    std::size_t count = 0;
    const auto n1 = static_cast<long long>(R / K) + 1, n2 = static_cast<long long>(R / L) + 1;
    for (long long a = -n1; a <= n1; ++a) {
      for (long long b = -n2; b <= n2; ++b) {
        const double q = std::pow(double(a) * K, 2) + std::pow(double(b) * L, 2);
        count += (q > 4.0 && q <= R * R) ? 1 : 0;
      }
    }
    const double kl = static_cast<double>(K * L);
    EXPECT_NEAR(rep.lhs, kl * kl * static_cast<double>(count), 1e-9 * rep.lhs + 1e-9);
    EXPECT_TRUE(rep.pass);
  }
}

TEST(Cassels, RandomSetsPass) {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<std::size_t> nn(10, 400);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = nn(gen);
    const auto rep = cassels_check(uniform_points(n, 1000 + t), 4.0 * std::sqrt(double(n)), 2.0);
    EXPECT_TRUE(rep.pass) << n;
    EXPECT_GE(rep.lhs, 0.0);
  }
  EXPECT_THROW(cassels_check(grid(2, 2), 1.0, 2.0), std::invalid_argument);
}

TEST(Budget, PartitionSumsToParseval) {
  for (double sigma : {0.75, 1.0}) {
    const auto g = grid_for_sigma(4096, sigma);
    const double unit = static_cast<double>(std::max(g.K, g.L));
    const auto rep = budget_partition(sigma, g.K, g.L, 4.0 * unit);
    const ConvexBody b = make_body(sigma >= 1 ? BodySpec::c_one() : BodySpec::c_sigma(sigma));
    const auto est = parseval_discrepancy(b, g.points, {0, 1}, capped(4, 4));
    EXPECT_NEAR(rep.total / est.value, 1.0, 1e-9);
    EXPECT_NEAR(rep.S1 + rep.S2 + rep.S3, rep.total, 1e-12 * rep.total);
    EXPECT_GT(rep.n1 + rep.n2, 0u);
    if (sigma >= 1.0) {
      EXPECT_EQ(rep.n3, 0u);
    }
    EXPECT_DOUBLE_EQ(rep.S1_over_L(), rep.S1 / static_cast<double>(g.L));
  }
}

TEST(Budget, RegionsAreExclusive) {
  for (double sigma : {0.5, 0.75, 1.0}) {
    for (double a : {0.0, 1.0, 5.0, 40.0}) {
      for (double b : {0.0, 1.0, 7.0, 64.0}) {
        const int r = budget_region(sigma, a, b);
        EXPECT_GE(r, 1);
        EXPECT_LE(r, sigma >= 1.0 ? 2 : 3);
      }
    }
  }
}
