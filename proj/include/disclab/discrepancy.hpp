#pragma once

// (t, λ)-averaged squared discrepancy: Monte Carlo and Parseval engines, the
// lattice-sum check and the Γ-partition diagnostic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "disclab/fourier.hpp"
#include "disclab/geometry.hpp"
#include "disclab/numeric.hpp"
#include "disclab/pointsets.hpp"

namespace disclab {

struct LambdaRange {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

inline void validate_range(const ConvexBody& body, LambdaRange r) {
  if (!(r.lo >= 0.0 && r.lo < r.hi && r.hi <= 1.0)) {
    throw std::domain_error("lambda range must satisfy 0 <= lo < hi <= 1");
  }
  if (r.hi * (body.circumradius() + norm(body.center())) > 0.5 * (1.0 + 1e-12)) {
    throw std::domain_error("lambda range violates the torus embedding");
  }
}

struct ShellRecord {
  double radius = 0.0;        // outer radius M_k
  double contribution = 0.0;  // sum of terms with M_{k−1} < |m| ≤ M_k
  std::size_t terms = 0;
};

struct DiscrepancyEstimate {
  double value = 0.0;
  double std_error = 0.0;   // Monte Carlo
  double tail_bound = 0.0;  // Parseval
  std::string engine;
  double truncation_radius = 0.0;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  bool flagged = false;  // Parseval cap reached before the stop rule
  std::vector<ShellRecord> shells;
  std::size_t spectra = 0;
};

/// Unit of the shell radii for sets without grid structure. Grid sets always
/// use max(K, L).
enum class DenseUnits { absolute, sqrt_n };

inline std::string to_string(DenseUnits u) { return u == DenseUnits::sqrt_n ? "sqrt_n" : "absolute"; }

inline DenseUnits dense_units_from_string(const std::string& s) {
  if (s == "absolute") return DenseUnits::absolute;
  if (s == "sqrt_n") return DenseUnits::sqrt_n;
  throw std::invalid_argument("unknown dense_units: " + s + " (expected absolute or sqrt_n)");
}

struct TruncationPolicy {
  double M0 = 8.0;        // first shell radius, in lattice units
  double growth = 2.0;    // shell radius ratio
  double eps_rel = 1e-3;  // stop when shell/cumulative < eps_rel ...
  int window = 3;         // ... for this many consecutive non-empty shells
  double M_max = 1e6;     // hard cap on the radius, in lattice units
  bool force_dense = false;
  DenseUnits dense_units = DenseUnits::absolute;

  void validate() const {
    if (!(M0 >= 4.0)) throw std::invalid_argument("policy: M0 must be >= 4");
    if (!(growth > 1.0)) throw std::invalid_argument("policy: growth must be > 1");
    if (!(eps_rel > 0.0)) throw std::invalid_argument("policy: eps_rel must be > 0");
    if (window < 2) throw std::invalid_argument("policy: window must be >= 2");
    if (!(M_max >= M0)) throw std::invalid_argument("policy: M_max must be >= M0");
  }
};

// ---------------------------------------------------------------------------
// Counting.

/// x reduced modulo 1 into [−1/2, 1/2).
inline double wrap_centered(double x) { return x - std::floor(x + 0.5); }

/// card{j : (u_j − t) mod 1 ∈ λC} with the closed body.
inline std::size_t count_in(const ConvexBody& body, double lambda, Vec2 t, const PointSet& P) {
  if (!(lambda >= 0.0) ||
      lambda * (body.circumradius() + norm(body.center())) > 0.5 * (1.0 + 1e-12)) {
    throw std::domain_error("count_in: lambda violates the torus embedding");
  }
  std::size_t c = 0;
  for (const Vec2& u : P.points()) {
    const Vec2 d{wrap_centered(u.x - t.x), wrap_centered(u.y - t.y)};
    if (lambda == 0.0) {
      c += (d.x == 0.0 && d.y == 0.0) ? 1 : 0;
    } else if (contains(body, d / lambda)) {
      ++c;
    }
  }
  return c;
}

/// Mean of (count − λ²N·area)² over i.i.d. t ~ U(T²), λ ~ U[lo, hi], times
/// hi − lo. Sample i uses counters 3i, 3i+1, 3i+2 of the Monte Carlo stream.
inline DiscrepancyEstimate mc_discrepancy(const ConvexBody& body, const PointSet& P,
                                          LambdaRange range, std::size_t samples,
                                          std::uint64_t seed) {
  validate_range(body, range);
  if (samples < 100) throw std::invalid_argument("mc_discrepancy: need samples >= 100");
  const CounterRng rng(seed, static_cast<std::uint64_t>(RngStream::monte_carlo));
  const double n_area = static_cast<double>(P.size()) * body.area();
  std::vector<double> values(samples);
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    for (std::size_t i = b * kBlock; i < std::min(samples, (b + 1) * kBlock); ++i) {
      const Vec2 t{rng.uniform(3 * i), rng.uniform(3 * i + 1)};
      const double lambda = range.lo + range.width() * rng.uniform(3 * i + 2);
      const double d = static_cast<double>(count_in(body, lambda, t, P)) - lambda * lambda * n_area;
      values[i] = d * d;
    }
  });
  const double n = static_cast<double>(samples);
  const double mean = pairwise_sum(values) / n;
  std::vector<double> dev(samples);
  for (std::size_t i = 0; i < samples; ++i) dev[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(dev) / (n - 1.0);
  DiscrepancyEstimate est;
  est.engine = "mc";
  est.value = range.width() * mean;
  est.std_error = range.width() * std::sqrt(var / n);
  est.samples = samples;
  est.seed = seed;
  return est;
}

// ---------------------------------------------------------------------------
// λ-integrals I(m) = ∫ λ⁴|χ̂(λm)|² dλ.

namespace detail {

/// Cumulative F(ρ) = ∫_0^ρ r⁴|χ̂(rΘ)|² dr on a ray spectrum grid.
class RayIntegral {
 public:
  explicit RayIntegral(RaySpectrum sp) : sp_(std::move(sp)), cum_(sp_.rho.size(), 0.0) {
    for (std::size_t k = 1; k < cum_.size(); ++k) {
      cum_[k] = cum_[k - 1] + 0.5 * sp_.delta_rho * (g(k - 1) + g(k));
    }
  }
  double F(double r) const {
    const double x = r / sp_.delta_rho;
    auto k = std::min(static_cast<std::size_t>(std::floor(x)), cum_.size() - 1);
    if (k + 1 >= cum_.size()) k = cum_.size() - 2;
    const double frac = r - sp_.rho[k];
    return cum_[k] + 0.5 * frac * (g(k) + std::pow(r, 4) * std::norm(sp_.at(r)));
  }

 private:
  double g(std::size_t k) const { return std::pow(sp_.rho[k], 4) * std::norm(sp_.ft[k]); }
  RaySpectrum sp_;
  std::vector<double> cum_;
};

/// Simpson λ-integral with closed-form transforms, max(32, 8⌈|m|w⌉) panels.
inline double lambda_integral_closed(const ConvexBody& body, LatticeVec m, LambdaRange range,
                                     double width) {
  const double mn = m.norm();
  std::size_t panels = std::max<std::size_t>(32, 8 * static_cast<std::size_t>(std::ceil(mn * width)));
  if (panels % 2 != 0) ++panels;
  const double h = range.width() / static_cast<double>(panels);
  std::vector<double> y(panels + 1);
  const Vec2 mv{static_cast<double>(m.m1), static_cast<double>(m.m2)};
  for (std::size_t i = 0; i <= panels; ++i) {
    const double lam = range.lo + h * static_cast<double>(i);
    y[i] = std::pow(lam, 4) * std::norm(ft_body(body, mv * lam));
  }
  return simpson_uniform(y, h);
}

inline bool has_closed_form(const ConvexBody& body) {
  return body.disk_radius().has_value() || !body.polygon().empty();
}

inline LatticeVec primitive(LatticeVec m) {
  const long long g = std::gcd(std::llabs(m.m1), std::llabs(m.m2));
  return {m.m1 / g, m.m2 / g};
}

inline constexpr std::size_t kMinOversample = 4;
/// Profile samples per unit of ρ·w; moves shell sums by < 0.3% against 256.
inline constexpr double kNodesPerWidth = 16.0;

/// I(m) for every m in `ms` (all nonzero). Lattice vectors sharing a
/// primitive direction share one ray spectrum. Returns values in input order
/// and the number of spectra computed.
inline std::pair<std::vector<double>, std::size_t> lambda_integrals(
    const ConvexBody& body, std::span<const LatticeVec> ms, LambdaRange range) {
  std::vector<double> out(ms.size(), 0.0);
  if (ms.empty()) return {out, 0};
  if (has_closed_form(body)) {
    const double width = 2.0 * body.circumradius();
    parallel_for(ms.size(), [&](std::size_t i) {
      out[i] = lambda_integral_closed(body, ms[i], range, width);
    });
    return {out, 0};
  }
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const LatticeVec p = primitive(ms[i]);
    groups[{p.m1, p.m2}].push_back(i);
  }
  std::vector<std::pair<LatticeVec, const std::vector<std::size_t>*>> work;
  for (const auto& [key, idx] : groups) work.push_back({{key.first, key.second}, &idx});
  parallel_for(work.size(), [&](std::size_t w) {
    const LatticeVec p = work[w].first;
    const auto& idx = *work[w].second;
    double top = 0.0;
    for (std::size_t i : idx) top = std::max(top, ms[i].norm());
    const Direction dir = Direction::from_vector({static_cast<double>(p.m1), static_cast<double>(p.m2)});
    const double width = slicer(body, dir).width();
    const double rho_max = range.hi * top * (1.0 + 1e-9) + 4.0 / width;
    const double pn = p.norm();
    // |χ̂|² along the ray is band-limited to [−w, w], so 4 nodes per 1/w keep
    // twice the Nyquist rate; ≥ 32 nodes land on the shortest integral.
    const double os_need = 32.0 / (pn * width * range.width());
    const std::size_t os = std::max<std::size_t>(
        kMinOversample, next_pow2(static_cast<std::size_t>(std::ceil(os_need))));
    // Sampling density, and at least the Nyquist count for rho_max.
    const double rw = rho_max * width;
    const std::size_t n_t = std::max(
        std::clamp<std::size_t>(next_pow2(static_cast<std::size_t>(std::ceil(kNodesPerWidth * rw))), 4096,
                                kProfileNodes),
        next_pow2(static_cast<std::size_t>(std::ceil(2.0 * rw)) + 2));
    const RayIntegral ri(ray_spectrum(body, dir, rho_max, os, n_t));
    for (std::size_t i : idx) {
      const double mn = ms[i].norm();
      out[i] = (ri.F(range.hi * mn) - ri.F(range.lo * mn)) / std::pow(mn, 5);
    }
  });
  return {out, work.size()};
}

/// Memo of I(m) for one body and λ-range, shared by runs on different point
/// sets. Values are those of the first call that needed them.
class IntegralCache {
 public:
  IntegralCache(const ConvexBody& body, LambdaRange range) : body_(body), range_(range) {}

  bool serves(const ConvexBody& body, LambdaRange range) const {
    return body.data() == body_.data() && range.lo == range_.lo && range.hi == range_.hi;
  }

  /// I(m) for each m; returns values and the number of new spectra.
  std::pair<std::vector<double>, std::size_t> get(std::span<const LatticeVec> ms) {
    std::lock_guard lock(mutex_);
    std::vector<LatticeVec> missing;
    for (const LatticeVec& m : ms) {
      if (!memo_.contains({m.m1, m.m2})) missing.push_back(m);
    }
    std::sort(missing.begin(), missing.end(), [](LatticeVec a, LatticeVec b) {
      return std::pair(a.m1, a.m2) < std::pair(b.m1, b.m2);
    });
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    const auto [fresh, spectra] = lambda_integrals(body_, missing, range_);
    for (std::size_t i = 0; i < missing.size(); ++i) memo_[{missing[i].m1, missing[i].m2}] = fresh[i];
    std::vector<double> out(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) out[i] = memo_.at({ms[i].m1, ms[i].m2});
    return {out, spectra};
  }

 private:
  ConvexBody body_;
  LambdaRange range_;
  std::map<std::pair<long long, long long>, double> memo_;
  std::mutex mutex_;
};

/// Upper bound for Σ_{|m|>M, m∈Λ} |S(m)|² I(m) from the direction-uniform
/// majorant |χ̂(ρΘ)| ≤ ρ⁻¹·Cmax(1/ρ) (ρ ≥ 4/w_min), |χ̂| ≤ area below, where
/// Cmax(δ) is the largest chord at depth δ over all directions.
class TailMajorant {
 public:
  explicit TailMajorant(const ConvexBody& body) : area_(body.area()) {
    if (body.has_flats()) {
      infinite_ = true;
      return;
    }
    constexpr int kDirections = 720;
    std::vector<Slicer> slicers;
    w_min_ = kInf;
    for (int i = 0; i < kDirections; ++i) {
      slicers.emplace_back(body.data(), Direction(kTwoPi * i / kDirections));
      w_min_ = std::min(w_min_, slicers.back().width());
    }
    w_min_ *= 1.0 - 1e-3;
    const double d_top = 0.25 * w_min_;
    deltas_ = geometric_grid(1e-12, d_top, 241);
    cmax_.resize(deltas_.size());
    parallel_for(deltas_.size(), [&](std::size_t k) {
      double c = 0.0;
      for (const auto& s : slicers) c = std::max(c, s.chord(deltas_[k]));
      cmax_[k] = 1.01 * c;  // slack for the direction sampling
    });
    // cum_[k] = ∫_0^{δ_k} Cmax²/δ dδ with upper steps; chords grow at least
    // like δ^{1/2} below δ_0 for every body here, giving Cmax(δ_0)² there.
    cum_.resize(deltas_.size());
    cum_[0] = cmax_[0] * cmax_[0];
    for (std::size_t k = 1; k < deltas_.size(); ++k) {
      cum_[k] = cum_[k - 1] + cmax_[k] * cmax_[k] * std::log(deltas_[k] / deltas_[k - 1]);
    }
  }

  bool finite() const { return !infinite_; }

  /// G(x) = ∫_x^∞ φ(s)s ds for the radial majorant φ of |χ̂|².
  double G(double x) const {
    if (infinite_) return kInf;
    const double x0 = 4.0 / w_min_;
    if (x < x0) return 0.5 * area_ * area_ * (x0 * x0 - x * x) + cum_.back();
    const double d = 1.0 / x;
    auto it = std::lower_bound(deltas_.begin(), deltas_.end(), d);
    if (it == deltas_.begin()) return cum_[0];
    const auto k = static_cast<std::size_t>(it - deltas_.begin());
    return cum_[k - 1] + cmax_[k] * cmax_[k] * std::log(d / deltas_[k - 1]);
  }

  /// Σ over Λ (cell area `cell`, half-diagonal `half_diag`) of |m| > M.
  double bound(double M, LambdaRange range, double s2max, double cell, double half_diag) const {
    if (infinite_) return kInf;
    const double R = M - 2.0 * half_diag;
    if (!(R > 0.0)) return kInf;
    const double pre = s2max * (kTwoPi / cell) * (1.0 + half_diag / R);
    constexpr int kPanels = 64;
    const double h = range.width() / kPanels;
    // G is decreasing, so the upper Riemann sum of λ²G(λR) bounds the integral.
    double s = 0.0;
    for (int i = 0; i < kPanels; ++i) {
      const double lam_hi = range.lo + h * (i + 1), lam_lo = range.lo + h * i;
      s += h * lam_hi * lam_hi * G(lam_lo * R);
    }
    return pre * s;
  }

 private:
  double area_;
  bool infinite_ = false;
  double w_min_ = 0.0;
  std::vector<double> deltas_, cmax_, cum_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Parseval engine.

namespace detail {

/// Lattice enumeration for one shell: vectors m with r_in < |m| ≤ r_out from
/// one representative per symmetry class, with multiplicities.
struct ShellTerms {
  std::vector<LatticeVec> m;
  std::vector<double> weight;  // |S(m)|²·multiplicity
};

inline ShellTerms enumerate_shell(const PointSet& P, bool use_grid, bool quadrant, double r_in,
                                  double r_out) {
  ShellTerms sh;
  const double in2 = r_in * r_in, out2 = r_out * r_out;
  if (use_grid) {
    const auto& g = *P.grid();
    const auto K = static_cast<long long>(g.K), L = static_cast<long long>(g.L);
    const double s2 = std::pow(static_cast<double>(K * L), 2);
    const auto n1max = static_cast<long long>(std::floor(r_out / K));
    for (long long n1 = quadrant ? 0 : -n1max; n1 <= n1max; ++n1) {
      const double x = static_cast<double>(K * n1);
      const double rem = out2 - x * x;
      if (rem < 0.0) continue;
      const auto n2max = static_cast<long long>(std::floor(std::sqrt(rem) / L));
      for (long long n2 = 0; n2 <= n2max; ++n2) {
        if (n1 == 0 && n2 == 0) continue;
        // Half-plane {n2 > 0} ∪ {n2 = 0, n1 > 0}; quadrant {n1, n2 ≥ 0}.
        if (n2 == 0 && n1 < 0) continue;
        const double y = static_cast<double>(L * n2);
        const double r2 = x * x + y * y;
        if (r2 <= in2 || r2 > out2) continue;
        double mult = 2.0;
        if (quadrant && n1 != 0 && n2 != 0) mult = 4.0;
        sh.m.push_back({K * n1, L * n2});
        sh.weight.push_back(mult * s2);
      }
    }
    return sh;
  }
  const auto mmax = static_cast<long long>(std::floor(r_out));
  std::vector<LatticeVec> ms;
  for (long long m1 = -mmax; m1 <= mmax; ++m1) {
    for (long long m2 = 0; m2 <= mmax; ++m2) {
      if (m2 == 0 && m1 <= 0) continue;
      const double r2 = static_cast<double>(m1 * m1 + m2 * m2);
      if (r2 <= in2 || r2 > out2) continue;
      ms.push_back({m1, m2});
    }
  }
  sh.m = ms;
  sh.weight.resize(ms.size());
  parallel_for(ms.size(), [&](std::size_t i) { sh.weight[i] = 2.0 * std::norm(exp_sum(P, ms[i])); });
  return sh;
}

}  // namespace detail

/// Σ_{m≠0, |m|≤M} |S(m)|²·I(m) with M grown shell by shell per the policy;
/// grid-structured sets sum over KZ×LZ only, in shells scaled by max(K, L);
/// other sets use shells scaled per `policy.dense_units`.
inline DiscrepancyEstimate parseval_discrepancy(const ConvexBody& body, const PointSet& P,
                                                LambdaRange range,
                                                const TruncationPolicy& policy = {},
                                                detail::IntegralCache* cache = nullptr) {
  validate_range(body, range);
  policy.validate();
  if (cache && !cache->serves(body, range)) {
    throw std::invalid_argument("parseval_discrepancy: cache built for another body or range");
  }
  const bool use_grid = P.grid().has_value() && !policy.force_dense;
  const bool quadrant = use_grid && body.mirror_symmetric();
  double unit = 1.0, cell = 1.0, half_diag = 0.5 * std::sqrt(2.0);
  if (use_grid) {
    const auto& g = *P.grid();
    unit = static_cast<double>(std::max(g.K, g.L));
    cell = static_cast<double>(g.K * g.L);
    half_diag = 0.5 * std::hypot(static_cast<double>(g.K), static_cast<double>(g.L));
  } else if (policy.dense_units == DenseUnits::sqrt_n) {
    unit = std::ceil(std::sqrt(static_cast<double>(P.size())));
  }
  DiscrepancyEstimate est;
  est.engine = "parseval";
  double total = 0.0;
  int quiet = 0;
  double r_in = 0.0;
  for (double M = policy.M0;; M *= policy.growth) {
    const bool last = M >= policy.M_max;
    const double r_out = std::min(M, policy.M_max) * unit;
    auto sh = detail::enumerate_shell(P, use_grid, quadrant, r_in, r_out);
    const auto [ints, spectra] =
        cache ? cache->get(sh.m) : detail::lambda_integrals(body, sh.m, range);
    std::vector<double> terms(ints.size());
    for (std::size_t i = 0; i < ints.size(); ++i) terms[i] = sh.weight[i] * ints[i];
    const double c = pairwise_sum(terms);
    total += c;
    est.spectra += spectra;
    est.shells.push_back({r_out, c, terms.size()});
    est.truncation_radius = r_out;
    r_in = r_out;
    if (!terms.empty()) {
      quiet = (total > 0.0 && c / total < policy.eps_rel) ? quiet + 1 : 0;
    }
    if (quiet >= policy.window) break;
    if (last) {
      est.flagged = true;
      break;
    }
  }
  est.value = total;
  const double n = static_cast<double>(P.size());
  est.tail_bound =
      detail::TailMajorant(body).bound(est.truncation_radius, range, n * n, cell, half_diag);
  return est;
}

// ---------------------------------------------------------------------------
// Lattice-sum check over Ω \ U with Ω, U centered closed disks.

struct CasselsReport {
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t lattice_points = 0;  // card((Ω∖U) ∩ Z²)
  std::size_t inner_points = 0;    // card(U ∩ Z²)
  bool pass = false;
};

inline CasselsReport cassels_check(const PointSet& P, double R_omega, double r_u) {
  if (!(R_omega > r_u && r_u >= 0.0)) throw std::invalid_argument("cassels_check: need R > r >= 0");
  CasselsReport rep;
  const double n = static_cast<double>(P.size());
  const auto rmax = static_cast<long long>(std::floor(R_omega));
  const double R2 = R_omega * R_omega, r2 = r_u * r_u;
  std::vector<LatticeVec> ms;
  for (long long m1 = -rmax; m1 <= rmax; ++m1) {
    for (long long m2 = -rmax; m2 <= rmax; ++m2) {
      const auto q = static_cast<double>(m1 * m1 + m2 * m2);
      if (q <= r2) {
        ++rep.inner_points;
      } else if (q <= R2) {
        ms.push_back({m1, m2});
      }
    }
  }
  rep.lattice_points = ms.size();
  std::vector<double> terms(ms.size());
  if (P.grid()) {
    for (std::size_t i = 0; i < ms.size(); ++i) terms[i] = std::norm(exp_sum(P, ms[i]));
  } else {
    const ExpSumTable table(P, static_cast<std::size_t>(rmax), static_cast<std::size_t>(rmax));
    parallel_for(ms.size(), [&](std::size_t i) { terms[i] = std::norm(table(ms[i])); });
  }
  rep.lhs = pairwise_sum(terms);
  rep.rhs = n * kPi * R2 / 4.0 - static_cast<double>(rep.inner_points) * n * n;
  rep.pass = rep.lhs >= rep.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Γ-partition of the grid-path sum.

struct BudgetReport {
  double S1 = 0.0, S2 = 0.0, S3 = 0.0;  // partial sums
  double total = 0.0;
  std::size_t n1 = 0, n2 = 0, n3 = 0;   // term counts
  double L = 1.0;
  double S1_over_L() const { return S1 / L; }
  double S2_over_L() const { return S2 / L; }
  double S3_over_L() const { return S3 / L; }
};

/// Region of n = (n₁, n₂) ≠ 0 with a = |Kn₁|, b = |Ln₂|. For σ < 1:
/// Γ₁ = {a ≥ b}, Γ₂ = {b^σ < a < b}, Γ₃ = {a ≤ b^σ}. For σ = 1:
/// Γ₁ = {a ≤ b/4}, Γ₂ = the rest and Γ₃ = ∅.
inline int budget_region(double sigma, double a, double b) {
  if (sigma >= 1.0) return a <= 0.25 * b ? 1 : 2;
  if (a >= b) return 1;
  if (a > std::pow(b, sigma)) return 2;
  return 3;
}

/// K²L² Σ_{Γᵢ} ∫_0^1 λ⁴|χ̂(λ(Kn₁, Ln₂))|² dλ over |(Kn₁, Ln₂)| ≤ M on C_σ
/// (C₁ when σ = 1).
inline BudgetReport budget_partition(double sigma, std::size_t K, std::size_t L, double M) {
  const ConvexBody body = make_body(sigma >= 1.0 ? BodySpec::c_one() : BodySpec::c_sigma(sigma));
  const PointSet P = grid(K, L);
  const auto sh = detail::enumerate_shell(P, true, body.mirror_symmetric(), 0.0, M);
  const auto [ints, spectra] = detail::lambda_integrals(body, sh.m, {0.0, 1.0});
  BudgetReport rep;
  rep.L = static_cast<double>(L);
  std::vector<double> s1, s2, s3;
  for (std::size_t i = 0; i < ints.size(); ++i) {
    const double t = sh.weight[i] * ints[i];
    const double a = std::abs(static_cast<double>(sh.m[i].m1));
    const double b = std::abs(static_cast<double>(sh.m[i].m2));
    switch (budget_region(sigma, a, b)) {
      case 1: s1.push_back(t); break;
      case 2: s2.push_back(t); break;
      default: s3.push_back(t); break;
    }
  }
  rep.S1 = pairwise_sum(s1);
  rep.S2 = pairwise_sum(s2);
  rep.S3 = pairwise_sum(s3);
  rep.n1 = s1.size();
  rep.n2 = s2.size();
  rep.n3 = s3.size();
  rep.total = rep.S1 + rep.S2 + rep.S3;
  return rep;
}

}  // namespace disclab
