#pragma once

// Point sets on the unit torus and their exponential sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "disclab/geometry.hpp"
#include "disclab/numeric.hpp"

namespace disclab {

// ---------------------------------------------------------------------------
// Counter-based generator: value(i) = mix64(key + (i+1)·γ) with
// key = mix64(seed ^ stream·K₁), mix64 the SplitMix64 finalizer.

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamMul = 0xd1b54a32d192ed03ULL;

  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ (stream * kStreamMul))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kGamma);
  }
  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Streams keep independent consumers of one seed apart.
enum class RngStream : std::uint64_t { points = 0, monte_carlo = 1, experiment = 2 };

/// Fresh 64-bit seed from the system entropy source.
inline std::uint64_t draw_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------------------

struct GridStructure {
  std::size_t K = 1, L = 1;
  Vec2 offset{};  // points are (k/K, l/L) ⊕ offset
};

/// N points in [0, 1)².
class PointSet {
 public:
  PointSet(std::vector<Vec2> pts, std::optional<GridStructure> grid = std::nullopt,
           std::optional<std::uint64_t> seed = std::nullopt, std::string generator = "explicit")
      : points_(std::move(pts)), grid_(grid), seed_(seed), generator_(std::move(generator)) {
    if (points_.empty()) throw std::invalid_argument("PointSet: need N >= 1");
    for (const Vec2& p : points_) {
      if (!(p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0)) {
        throw std::invalid_argument("PointSet: coordinates must lie in [0, 1)");
      }
    }
  }

  std::size_t size() const { return points_.size(); }
  std::span<const Vec2> points() const { return points_; }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }
  const std::optional<GridStructure>& grid() const { return grid_; }
  const std::optional<std::uint64_t>& seed() const { return seed_; }
  /// Generator description such as `grid(K=3,L=2)` or `uniform(N=5,seed=42)`.
  const std::string& generator() const { return generator_; }

 private:
  std::vector<Vec2> points_;
  std::optional<GridStructure> grid_;
  std::optional<std::uint64_t> seed_;
  std::string generator_;
};

/// x mod 1 in [0, 1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

inline PointSet grid(std::size_t K, std::size_t L) {
  if (K < 1 || L < 1) throw std::invalid_argument("grid: need K, L >= 1");
  std::vector<Vec2> pts;
  pts.reserve(K * L);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < L; ++l) {
      pts.push_back({static_cast<double>(k) / K, static_cast<double>(l) / L});
    }
  }
  std::ostringstream os;
  os << "grid(K=" << K << ",L=" << L << ")";
  return PointSet(std::move(pts), GridStructure{K, L, {}}, std::nullopt, os.str());
}

struct SigmaGrid {
  PointSet points;
  std::size_t K, L, N;
};

/// K = ⌊j^{(2σ+1)/(2σ+3)}⌋, L = ⌊j^{2/(2σ+3)}⌋ and the K×L grid.
inline SigmaGrid grid_for_sigma(std::size_t j, double sigma) {
  if (j < 2) throw std::invalid_argument("grid_for_sigma: need j >= 2");
  if (!(sigma >= 0.5 && sigma <= 1.0)) throw std::invalid_argument("grid_for_sigma: sigma in [1/2, 1]");
  const double jd = static_cast<double>(j);
  // The relative nudge keeps exact powers (e.g. 1024^{1/2}) from rounding down.
  const auto K = static_cast<std::size_t>(
      std::floor(std::pow(jd, (2.0 * sigma + 1.0) / (2.0 * sigma + 3.0)) * (1.0 + 1e-12)));
  const auto L =
      static_cast<std::size_t>(std::floor(std::pow(jd, 2.0 / (2.0 * sigma + 3.0)) * (1.0 + 1e-12)));
  if (K < 1 || L < 1) throw std::invalid_argument("grid_for_sigma: j too small");
  return {grid(K, L), K, L, K * L};
}

/// N i.i.d. uniform points; point i uses counters 2i and 2i+1.
inline PointSet uniform_points(std::size_t N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("uniform: need N >= 1");
  const CounterRng rng(seed, static_cast<std::uint64_t>(RngStream::points));
  std::vector<Vec2> pts(N);
  for (std::size_t i = 0; i < N; ++i) pts[i] = {rng.uniform(2 * i), rng.uniform(2 * i + 1)};
  std::ostringstream os;
  os << "uniform(N=" << N << ",seed=" << seed << ")";
  return PointSet(std::move(pts), std::nullopt, seed, os.str());
}

/// One uniform point in each cell [k/K, (k+1)/K)×[l/L, (l+1)/L); cell c = kL + l
/// uses counters 2c and 2c+1.
inline PointSet jittered(std::size_t K, std::size_t L, std::uint64_t seed) {
  if (K < 1 || L < 1) throw std::invalid_argument("jittered: need K, L >= 1");
  const CounterRng rng(seed, static_cast<std::uint64_t>(RngStream::points));
  std::vector<Vec2> pts;
  pts.reserve(K * L);
  auto in_cell = [](std::size_t k, std::size_t n, double u) {
    const double hi = static_cast<double>(k + 1) / n;
    const double x = (static_cast<double>(k) + u) / n;
    return std::min(x, std::nextafter(hi, 0.0));
  };
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t c = k * L + l;
      pts.push_back({in_cell(k, K, rng.uniform(2 * c)), in_cell(l, L, rng.uniform(2 * c + 1))});
    }
  }
  std::ostringstream os;
  os << "jittered(K=" << K << ",L=" << L << ",seed=" << seed << ")";
  return PointSet(std::move(pts), std::nullopt, seed, os.str());
}

/// P ⊕ v: every point translated by v modulo 1.
inline PointSet translated(const PointSet& P, Vec2 v) {
  std::vector<Vec2> pts;
  pts.reserve(P.size());
  for (const Vec2& p : P.points()) pts.push_back({wrap_unit(p.x + v.x), wrap_unit(p.y + v.y)});
  std::optional<GridStructure> g = P.grid();
  if (g) g->offset = {wrap_unit(g->offset.x + v.x), wrap_unit(g->offset.y + v.y)};
  return PointSet(std::move(pts), g, P.seed(), P.generator() + "+shift");
}

// ---------------------------------------------------------------------------
// Exponential sums S(m) = Σ_j e^{2πi m·u_j}.

struct LatticeVec {
  long long m1 = 0, m2 = 0;
  constexpr bool operator==(const LatticeVec&) const = default;
  double norm() const { return std::hypot(static_cast<double>(m1), static_cast<double>(m2)); }
};

/// e^{2πi m·u} with each product reduced modulo 1 before the phase.
inline cplx lattice_phase(LatticeVec m, Vec2 u) {
  const double a = static_cast<double>(m.m1) * u.x, b = static_cast<double>(m.m2) * u.y;
  const double r = (a - std::round(a)) + (b - std::round(b));
  return std::polar(1.0, kTwoPi * r);
}

/// Direct pairwise-summed S(m).
inline cplx exp_sum_direct(const PointSet& P, LatticeVec m) {
  std::vector<cplx> terms(P.size());
  for (std::size_t j = 0; j < P.size(); ++j) terms[j] = lattice_phase(m, P[j]);
  return pairwise_sum(terms);
}

/// S(m) through the grid closed form (KL·e^{2πim·offset} on KZ×LZ, 0 elsewhere)
/// when the set carries grid structure, direct summation otherwise.
inline cplx exp_sum(const PointSet& P, LatticeVec m) {
  if (const auto& g = P.grid()) {
    const auto K = static_cast<long long>(g->K), L = static_cast<long long>(g->L);
    if (m.m1 % K != 0 || m.m2 % L != 0) return 0.0;
    return static_cast<double>(K * L) * lattice_phase(m, g->offset);
  }
  return exp_sum_direct(P, m);
}

/// Batch S(m) for |m₁| ≤ M₁, |m₂| ≤ M₂ from per-point phase tables.
class ExpSumTable {
 public:
  ExpSumTable(const PointSet& P, std::size_t M1, std::size_t M2)
      : n_(P.size()), M1_(M1), M2_(M2), e1_((M1 + 1) * n_), e2_((M2 + 1) * n_) {
    for (std::size_t m = 0; m <= M1; ++m) {
      for (std::size_t j = 0; j < n_; ++j) {
        e1_[m * n_ + j] = lattice_phase({static_cast<long long>(m), 0}, P[j]);
      }
    }
    for (std::size_t m = 0; m <= M2; ++m) {
      for (std::size_t j = 0; j < n_; ++j) {
        e2_[m * n_ + j] = lattice_phase({0, static_cast<long long>(m)}, P[j]);
      }
    }
  }

  cplx operator()(LatticeVec m) const {
    if (static_cast<std::size_t>(std::llabs(m.m1)) > M1_ ||
        static_cast<std::size_t>(std::llabs(m.m2)) > M2_) {
      throw std::out_of_range("ExpSumTable: m outside table");
    }
    // S(−m) = conj S(m): reduce to m₁ ≥ 0.
    const bool flip = m.m1 < 0;
    if (flip) m = {-m.m1, -m.m2};
    const cplx* a = &e1_[static_cast<std::size_t>(m.m1) * n_];
    const cplx* b = &e2_[static_cast<std::size_t>(std::llabs(m.m2)) * n_];
    const bool conj_b = m.m2 < 0;
    thread_local std::vector<cplx> terms;
    terms.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) terms[j] = a[j] * (conj_b ? std::conj(b[j]) : b[j]);
    const cplx s = pairwise_sum(std::span<const cplx>(terms));
    return flip ? std::conj(s) : s;
  }

 private:
  std::size_t n_, M1_, M2_;
  std::vector<cplx> e1_, e2_;
};

}  // namespace disclab
