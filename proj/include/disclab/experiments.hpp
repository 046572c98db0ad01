#pragma once

// Scaling-exponent measurements, lower-envelope checks, and brute-force
// verifiers for the C_σ root and chord asymptotics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "disclab/discrepancy.hpp"
#include "disclab/geometry.hpp"
#include "disclab/numeric.hpp"
#include "disclab/pointsets.hpp"

namespace disclab {

// ---------------------------------------------------------------------------
// Least squares on log–log data.

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // 95% slope interval
  std::size_t n = 0;
};

/// OLS of log y on log x with the Student-t 95% slope interval.
inline LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_loglog: need >= 3 rows");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: values must be > 0");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double nd = static_cast<double>(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= nd;
  my /= nd;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog: x values must not all coincide");
  LogLogFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 1.0;
  fit.slope_se = std::sqrt(sse / (nd - 2.0) / sxx);
  const boost::math::students_t dist(nd - 2.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_lo = fit.slope - t * fit.slope_se;
  fit.ci_hi = fit.slope + t * fit.slope_se;
  return fit;
}

inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_loglog(std::span<const double>(x), std::span<const double>(y));
}

// ---------------------------------------------------------------------------
// Point-set generators indexed by a size parameter j.

enum class GeneratorKind { sigma_grid, square_grid, grid, uniform, jittered, single };

inline std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::sigma_grid: return "sigma_grid";
    case GeneratorKind::square_grid: return "square_grid";
    case GeneratorKind::grid: return "grid";
    case GeneratorKind::uniform: return "uniform";
    case GeneratorKind::jittered: return "jittered";
    case GeneratorKind::single: return "single";
  }
  return "?";
}

inline GeneratorKind generator_kind_from_string(const std::string& s) {
  for (auto k : {GeneratorKind::sigma_grid, GeneratorKind::square_grid, GeneratorKind::grid,
                 GeneratorKind::uniform, GeneratorKind::jittered, GeneratorKind::single}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown generator kind: " + s);
}

/// A point-set recipe. `j` sizes the families: sigma_grid uses grid_for_sigma(j, σ);
/// square_grid and jittered use K = L = ⌊√j⌋; uniform draws N = j points.
/// grid uses K, L directly; single is one point at `point`.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::uniform;
  double sigma = 0.75;
  std::size_t j = 64;
  std::size_t K = 8, L = 8;
  std::optional<std::uint64_t> seed;
  Vec2 point{0.5, 0.5};

  bool randomized() const {
    return kind == GeneratorKind::uniform || kind == GeneratorKind::jittered;
  }
  GeneratorSpec with_size(std::size_t size) const {
    GeneratorSpec g = *this;
    g.j = size;
    return g;
  }
};

/// Canonical one-line form, e.g. `kind=uniform,j=64,seed=7`.
inline std::string to_string(const GeneratorSpec& g) {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << to_string(g.kind);
  switch (g.kind) {
    case GeneratorKind::sigma_grid: os << ",sigma=" << g.sigma << ",j=" << g.j; break;
    case GeneratorKind::square_grid: os << ",j=" << g.j; break;
    case GeneratorKind::grid: os << ",K=" << g.K << ",L=" << g.L; break;
    case GeneratorKind::uniform:
    case GeneratorKind::jittered: os << ",j=" << g.j; break;
    case GeneratorKind::single: os << ",x=" << g.point.x << ",y=" << g.point.y; break;
  }
  if (g.seed) os << ",seed=" << *g.seed;
  return os.str();
}

inline std::size_t isqrt(std::size_t j) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(j)));
  while (r * r > j) --r;
  while ((r + 1) * (r + 1) <= j) ++r;
  return r;
}

/// Builds the point set; randomized kinds require a seed.
inline PointSet generate(const GeneratorSpec& g) {
  auto need_seed = [&] {
    if (!g.seed) throw std::invalid_argument("generate: " + to_string(g.kind) + " needs a seed");
    return *g.seed;
  };
  switch (g.kind) {
    case GeneratorKind::sigma_grid: return grid_for_sigma(g.j, g.sigma).points;
    case GeneratorKind::square_grid: {
      const std::size_t k = isqrt(g.j);
      return grid(k, k);
    }
    case GeneratorKind::grid: return grid(g.K, g.L);
    case GeneratorKind::uniform: return uniform_points(g.j, need_seed());
    case GeneratorKind::jittered: {
      const std::size_t k = isqrt(g.j);
      if (k < 1) throw std::invalid_argument("generate: jittered needs j >= 1");
      return jittered(k, k, need_seed());
    }
    case GeneratorKind::single: {
      std::ostringstream os;
      os.precision(17);
      os << "single(x=" << g.point.x << ",y=" << g.point.y << ")";
      return PointSet({g.point}, std::nullopt, std::nullopt, os.str());
    }
  }
  throw std::invalid_argument("generate: unknown kind");
}

// ---------------------------------------------------------------------------
// Engine selection.

enum class EngineKind { parseval, mc };

inline std::string to_string(EngineKind e) { return e == EngineKind::mc ? "mc" : "parseval"; }

inline EngineKind engine_kind_from_string(const std::string& s) {
  if (s == "parseval") return EngineKind::parseval;
  if (s == "mc") return EngineKind::mc;
  throw std::invalid_argument("unknown engine: " + s + " (expected parseval or mc)");
}

struct EngineSpec {
  EngineKind kind = EngineKind::parseval;
  TruncationPolicy policy;
  std::size_t samples = 100000;
};

/// Error bar of an estimate: the Monte Carlo standard error or the Parseval tail bound.
inline double error_of(const DiscrepancyEstimate& e) {
  return e.engine == "mc" ? e.std_error : e.tail_bound;
}

inline DiscrepancyEstimate run_engine(const ConvexBody& body, const PointSet& P, LambdaRange range,
                                      const EngineSpec& engine, std::uint64_t seed,
                                      detail::IntegralCache* cache = nullptr) {
  if (engine.kind == EngineKind::mc) return mc_discrepancy(body, P, range, engine.samples, seed);
  return parseval_discrepancy(body, P, range, engine.policy, cache);
}

/// Per-cell seed: counter `index` of the experiment stream of `seed`.
inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t index) {
  return CounterRng(seed, static_cast<std::uint64_t>(RngStream::experiment)).bits(index);
}

// ---------------------------------------------------------------------------
// Exponents.

/// 2/(2σ+3): the grid rate on C_σ (σ < 1) and C₁ (σ = 1).
inline double grid_exponent(double sigma) { return 2.0 / (2.0 * sigma + 3.0); }

// ---------------------------------------------------------------------------
// Scaling experiment.

struct ExperimentConfig {
  BodySpec body = BodySpec::c_sigma(0.75);
  GeneratorSpec generator;
  std::vector<std::size_t> sizes;  // j list, strictly increasing, length >= 4
  LambdaRange range{0.0, 1.0};
  EngineSpec engine;
  std::uint64_t seed = 0;
  double exponent = 0.5;
  double tolerance = 0.08;
  std::string output;  // path stem for CSV/JSON; empty for none

  void validate() const {
    if (sizes.size() < 4) throw std::invalid_argument("experiment: need >= 4 sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i) {
      if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("experiment: sizes must increase");
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("experiment: tolerance must be > 0");
    engine.policy.validate();
  }
};

struct ScalingRow {
  std::size_t j = 0;
  std::size_t N = 0;
  double D2 = 0.0;
  double err = 0.0;
  double ratio = 0.0;  // D2 / N^exponent
  bool flagged = false;
  std::string generator;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  LogLogFit fit;
  double exponent = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// D² for each size with the log–log slope compared to `exponent`.
inline ScalingReport scaling_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ConvexBody body = make_body(cfg.body);
  ScalingReport rep;
  rep.exponent = cfg.exponent;
  rep.tolerance = cfg.tolerance;
  rep.rows.resize(cfg.sizes.size());
  parallel_for(cfg.sizes.size(), [&](std::size_t i) {
    GeneratorSpec g = cfg.generator.with_size(cfg.sizes[i]);
    if (g.randomized()) g.seed = cell_seed(cfg.seed, i);
    const PointSet P = generate(g);
    const auto est = run_engine(body, P, cfg.range, cfg.engine, cell_seed(cfg.seed, i));
    ScalingRow& row = rep.rows[i];
    row.j = cfg.sizes[i];
    row.N = P.size();
    row.D2 = est.value;
    row.err = error_of(est);
    row.flagged = est.flagged;
    row.ratio = est.value / std::pow(static_cast<double>(P.size()), cfg.exponent);
    row.generator = to_string(g);
  });
  std::vector<double> ns, ds;
  for (const auto& r : rep.rows) {
    ns.push_back(static_cast<double>(r.N));
    ds.push_back(r.D2);
  }
  rep.fit = fit_loglog(ns, ds);
  rep.pass = std::abs(rep.fit.slope - cfg.exponent) <= cfg.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Lower envelopes.

struct EnvelopeConfig {
  BodySpec body = BodySpec::c_sigma(0.75);
  double exponent = 4.0 / 9.0;
  std::vector<GeneratorSpec> generators;
  std::vector<std::size_t> sizes;
  LambdaRange range{0.0, 1.0};
  EngineSpec engine;
  std::uint64_t seed = 0;
  double trend_floor = -0.05;  // minimum envelope log-ratio slope over the last decade of N

  void validate() const {
    if (generators.empty()) throw std::invalid_argument("envelope: need >= 1 generator");
    if (sizes.size() < 2) throw std::invalid_argument("envelope: need >= 2 sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i) {
      if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("envelope: sizes must increase");
    }
    engine.policy.validate();
  }
};

struct EnvelopeTrend {
  std::string generator;
  double slope = 0.0;  // d log(ratio) / d log N over N >= N_max/10
  std::size_t points = 0;
};

struct EnvelopePoint {
  std::size_t j = 0;
  std::size_t N = 0;  // N of the minimizing row
  double ratio = 0.0;
  std::string generator;
};

struct EnvelopeReport {
  std::vector<ScalingRow> rows;
  std::vector<EnvelopeTrend> trends;      // per generator, diagnostic
  std::vector<EnvelopePoint> envelope;    // min ratio over generators per size
  double envelope_trend = 0.0;            // slope of the envelope over its last decade of N
  double exponent = 0.0;
  double inf_ratio = kInf;
  std::size_t argmin_N = 0;
  std::string argmin_generator;
  double min_trend = kInf;
  bool pass = false;
};

/// Slope of log y on log x by least squares (two or more points).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

/// Least-squares slope of log ratio on log N over points with N ≥ N_max/10;
/// nullopt with fewer than two such points.
template <class Point>
std::optional<double> last_decade_trend(const std::vector<Point>& pts) {
  std::size_t n_max = 0;
  for (const auto& p : pts) n_max = std::max(n_max, p.N);
  std::vector<double> x, y;
  for (const auto& p : pts) {
    if (10 * p.N >= n_max && p.ratio > 0.0) {
      x.push_back(static_cast<double>(p.N));
      y.push_back(p.ratio);
    }
  }
  if (x.size() < 2) return std::nullopt;
  return loglog_slope(x, y);
}

/// D²/N^exponent across generators and sizes. The lower envelope takes the
/// smallest ratio over generators at each size; the check passes when its
/// infimum is positive and it trends down no faster than `trend_floor` over
/// its last decade of N.
inline EnvelopeReport lower_envelope_check(const EnvelopeConfig& cfg) {
  cfg.validate();
  const ConvexBody body = make_body(cfg.body);
  detail::IntegralCache cache(body, cfg.range);
  EnvelopeReport rep;
  rep.exponent = cfg.exponent;
  const std::size_t ns = cfg.sizes.size();
  rep.rows.resize(cfg.generators.size() * ns);
  parallel_for(rep.rows.size(), [&](std::size_t c) {
    const std::size_t gi = c / ns, si = c % ns;
    GeneratorSpec g = cfg.generators[gi].with_size(cfg.sizes[si]);
    if (g.randomized()) g.seed = cell_seed(cfg.seed, c);
    const PointSet P = generate(g);
    // Dense runs share the λ-integrals; grid runs use their sparse lattice.
    detail::IntegralCache* shared = P.grid() ? nullptr : &cache;
    const auto est = run_engine(body, P, cfg.range, cfg.engine, cell_seed(cfg.seed, c), shared);
    ScalingRow& row = rep.rows[c];
    row.j = cfg.sizes[si];
    row.N = P.size();
    row.D2 = est.value;
    row.err = error_of(est);
    row.flagged = est.flagged;
    row.ratio = est.value / std::pow(static_cast<double>(P.size()), cfg.exponent);
    row.generator = to_string(cfg.generators[gi].kind);
  });
  for (std::size_t gi = 0; gi < cfg.generators.size(); ++gi) {
    const std::vector<ScalingRow> arm(rep.rows.begin() + static_cast<std::ptrdiff_t>(gi * ns),
                                      rep.rows.begin() + static_cast<std::ptrdiff_t>((gi + 1) * ns));
    EnvelopeTrend t;
    t.generator = to_string(cfg.generators[gi].kind);
    std::size_t n_max = 0;
    for (const auto& r : arm) n_max = std::max(n_max, r.N);
    for (const auto& r : arm) t.points += (10 * r.N >= n_max && r.ratio > 0.0) ? 1 : 0;
    t.slope = last_decade_trend(arm).value_or(0.0);
    rep.min_trend = std::min(rep.min_trend, t.slope);
    rep.trends.push_back(t);
  }
  for (std::size_t si = 0; si < ns; ++si) {
    EnvelopePoint e;
    e.j = cfg.sizes[si];
    e.ratio = kInf;
    for (std::size_t gi = 0; gi < cfg.generators.size(); ++gi) {
      const ScalingRow& r = rep.rows[gi * ns + si];
      if (r.ratio < e.ratio) {
        e.ratio = r.ratio;
        e.N = r.N;
        e.generator = r.generator;
      }
    }
    if (e.ratio < rep.inf_ratio) {
      rep.inf_ratio = e.ratio;
      rep.argmin_N = e.N;
      rep.argmin_generator = e.generator;
    }
    rep.envelope.push_back(e);
  }
  const auto trend = last_decade_trend(rep.envelope);
  rep.envelope_trend = trend.value_or(0.0);
  rep.pass = rep.inf_ratio > 0.0 && trend.has_value() && rep.envelope_trend >= cfg.trend_floor;
  return rep;
}

// ---------------------------------------------------------------------------
// Roots of g(x) = (1+x)^{1/σ} − 1 − x/σ = y.

struct LemmaGReport {
  double sigma = 0.0;
  double y = 0.0;
  std::optional<double> root_neg;  // x ∈ [−1, 0); absent when y > 1/σ − 1
  double root_pos = 0.0;           // x > 0
  double predicted_scale = 0.0;    // y^{1/2} for y ≤ 1, y^σ for y > 1
  std::optional<double> ratio_neg;
  double ratio_pos = 0.0;
};

inline double lemma_g(double sigma, double x) {
  return std::pow(1.0 + x, 1.0 / sigma) - 1.0 - x / sigma;
}

inline LemmaGReport lemma_g_roots(double sigma, double y) {
  if (!(sigma > 0.5 && sigma < 1.0)) throw std::invalid_argument("lemma_g_roots: sigma in (1/2, 1)");
  if (!(y > 0.0)) throw std::invalid_argument("lemma_g_roots: need y > 0");
  LemmaGReport rep;
  rep.sigma = sigma;
  rep.y = y;
  auto f = [&](double x) { return lemma_g(sigma, x) - y; };
  // g is convex with minimum g(0) = 0: increasing on x > 0, decreasing on x < 0.
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  rep.root_pos = bisect_sign(f, 0.0, hi, 200);
  if (f(-1.0) >= 0.0) rep.root_neg = bisect_sign(f, -1.0, 0.0, 200);
  rep.predicted_scale = y <= 1.0 ? std::sqrt(y) : std::pow(y, sigma);
  rep.ratio_pos = rep.root_pos / rep.predicted_scale;
  if (rep.root_neg) rep.ratio_neg = std::abs(*rep.root_neg) / rep.predicted_scale;
  return rep;
}

// ---------------------------------------------------------------------------
// Chord asymptotics near the C_σ pole, in construction units (before scaling).

/// max(δ^σ, δ^{1/2}φ^{(2σ−1)/(2(1−σ))}) for tilt φ = θ − π/2 ≥ 0; the two
/// regimes meet at φ = δ^{1−σ}.
inline double chord_regime(double sigma, double phi, double delta) {
  const double pole = std::pow(delta, sigma);
  if (phi <= 0.0) return pole;
  const double e = (2.0 * sigma - 1.0) / (2.0 * (1.0 - sigma));
  return std::max(pole, std::sqrt(delta) * std::pow(phi, e));
}

/// δ/√((1/4 − tan φ)² + 3δ) for the corner at the C₁ pole.
inline double chord_regime_c_one(double phi, double delta) {
  const double a = 0.25 - std::tan(phi);
  return delta / std::sqrt(a * a + 3.0 * delta);
}

struct ChordSample {
  double phi = 0.0, delta = 0.0, chord = 0.0, formula = 0.0, ratio = 0.0;
};

struct ChordAsymptoticsReport {
  double sigma = 0.0;
  std::vector<ChordSample> samples;
  double ratio_min = kInf, ratio_max = 0.0;
  double window = 10.0;
  bool pass = false;
};

/// Measured chord of C_σ (C₁ for σ = 1) in direction θ = π/2 + φ at depth δ,
/// both in construction units, over the regime formula.
inline ChordAsymptoticsReport chord_asymptotics(double sigma, std::span<const double> phis,
                                                std::span<const double> deltas,
                                                double window = 10.0) {
  const bool one = sigma >= 1.0;
  if (!one && !(sigma >= 0.5 && sigma < 1.0)) {
    throw std::invalid_argument("chord_asymptotics: sigma in [1/2, 1]");
  }
  const ConvexBody body = make_body(one ? BodySpec::c_one() : BodySpec::c_sigma(sigma));
  const double s = body.scale();
  ChordAsymptoticsReport rep;
  rep.sigma = sigma;
  rep.window = window;
  for (double phi : phis) {
    if (phi < 0.0) throw std::invalid_argument("chord_asymptotics: tilt must be >= 0");
    const Slicer sl = slicer(body, Direction(0.5 * kPi + phi));
    for (double delta : deltas) {
      if (!(delta > 0.0) || delta * s > sl.width()) {
        throw std::invalid_argument("chord_asymptotics: depth outside the body");
      }
      ChordSample cs;
      cs.phi = phi;
      cs.delta = delta;
      cs.chord = sl.chord(delta * s) / s;
      cs.formula = one ? chord_regime_c_one(phi, delta) : chord_regime(sigma, phi, delta);
      cs.ratio = cs.chord / cs.formula;
      rep.ratio_min = std::min(rep.ratio_min, cs.ratio);
      rep.ratio_max = std::max(rep.ratio_max, cs.ratio);
      rep.samples.push_back(cs);
    }
  }
  rep.pass = !rep.samples.empty() && rep.ratio_min >= 1.0 / window && rep.ratio_max <= window;
  return rep;
}

}  // namespace disclab
