#pragma once

// Planar convex bodies: boundary made of analytic pieces (segments, circular
// arcs, power-law graphs), support intervals, X-ray profiles, chords and
// split chords, plus the body family used by the experiments.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "disclab/numeric.hpp"

namespace disclab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

/// Unit direction with angle canonicalized to [0, 2π).
class Direction {
 public:
  explicit Direction(double theta) : theta_(canonical(theta)), u_{std::cos(theta_), std::sin(theta_)} {}

  /// Direction of a nonzero vector; the stored unit vector is v/|v| exactly.
  static Direction from_vector(Vec2 v) {
    const double n = norm(v);
    if (!(n > 0.0)) throw std::invalid_argument("Direction::from_vector: zero vector");
    return Direction(canonical(std::atan2(v.y, v.x)), v / n);
  }

  double theta() const { return theta_; }
  Vec2 unit() const { return u_; }
  /// Unit vector rotated by +π/2.
  Vec2 normal() const { return perp(u_); }
  Direction opposite() const { return Direction(canonical(theta_ + kPi), -u_); }

  static double canonical(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
  }

 private:
  Direction(double theta, Vec2 u) : theta_(theta), u_(u) {}
  double theta_;
  Vec2 u_;
};

// ---------------------------------------------------------------------------
// Boundary pieces. Each piece is parameterized by s in [0, 1] in the
// counterclockwise direction and turns by less than π.

struct Segment {
  Vec2 a, b;
  Vec2 point(double s) const { return a + (b - a) * s; }
  Vec2 tangent(double) const { return b - a; }
  std::pair<Vec2, Vec2> jet(double s) const { return {point(s), b - a}; }
  double green() const { return 0.5 * cross(a, b); }
};

struct Arc {
  Vec2 center;
  double radius = 0.0;
  double phi0 = 0.0, phi1 = 0.0;
  Vec2 point(double s) const {
    const double p = phi0 + (phi1 - phi0) * s;
    return center + Vec2{std::cos(p), std::sin(p)} * radius;
  }
  Vec2 tangent(double s) const {
    const double p = phi0 + (phi1 - phi0) * s;
    return Vec2{-std::sin(p), std::cos(p)} * (radius * (phi1 - phi0));
  }
  std::pair<Vec2, Vec2> jet(double s) const {
    const double p = phi0 + (phi1 - phi0) * s;
    const double c = std::cos(p), sn = std::sin(p);
    return {center + Vec2{c, sn} * radius, Vec2{-sn, c} * (radius * (phi1 - phi0))};
  }
  double green() const {
    const double r = radius;
    return 0.5 * (r * r * (phi1 - phi0) +
                  r * (center.x * (std::sin(phi1) - std::sin(phi0)) -
                       center.y * (std::cos(phi1) - std::cos(phi0))));
  }
};

/// Graph piece scale·(sx·u, sy·φ(u)) with φ(u) = c2·u^p + c1·u + c0, u from
/// u0 to u1 (u ≥ 0).
struct PowerGraph {
  double scale = 1.0;
  double sx = 1.0, sy = 1.0;
  double p = 2.0, c2 = 1.0, c1 = 0.0, c0 = -1.0;
  double u0 = 0.0, u1 = 1.0;

  double phi(double u) const { return c2 * std::pow(u, p) + c1 * u + c0; }
  double dphi(double u) const { return c2 * p * std::pow(u, p - 1.0) + c1; }
  double u_at(double s) const { return u0 + (u1 - u0) * s; }
  Vec2 point(double s) const {
    const double u = u_at(s);
    return Vec2{sx * u, sy * phi(u)} * scale;
  }
  Vec2 tangent(double s) const {
    const double u = u_at(s);
    return Vec2{sx, sy * dphi(u)} * (scale * (u1 - u0));
  }
  std::pair<Vec2, Vec2> jet(double s) const {
    const double u = u_at(s);
    const double up1 = u > 0.0 ? std::pow(u, p - 1.0) : 0.0;  // p > 1
    const double ph = c2 * up1 * u + c1 * u + c0;
    const double dph = c2 * p * up1 + c1;
    return {Vec2{sx * u, sy * ph} * scale, Vec2{sx, sy * dph} * (scale * (u1 - u0))};
  }
  double green() const {
    // ∫ (x dy − y dx)/2 = scale²·sx·sy/2 · ([uφ] − 2∫φ du) over [u0, u1].
    auto prim = [&](double u) {
      return c2 * std::pow(u, p + 1.0) / (p + 1.0) + 0.5 * c1 * u * u + c0 * u;
    };
    const double bracket = u1 * phi(u1) - u0 * phi(u0) - 2.0 * (prim(u1) - prim(u0));
    return 0.5 * scale * scale * sx * sy * bracket;
  }
};

using Piece = std::variant<Segment, Arc, PowerGraph>;

inline Vec2 piece_point(const Piece& pc, double s) {
  return std::visit([s](const auto& q) { return q.point(s); }, pc);
}
inline Vec2 piece_tangent(const Piece& pc, double s) {
  return std::visit([s](const auto& q) { return q.tangent(s); }, pc);
}
/// Point and tangent together.
inline std::pair<Vec2, Vec2> piece_jet(const Piece& pc, double s) {
  return std::visit([s](const auto& q) { return q.jet(s); }, pc);
}
inline double piece_green(const Piece& pc) {
  return std::visit([](const auto& q) { return q.green(); }, pc);
}

// ---------------------------------------------------------------------------
// Body specifications.

enum class BodyKind { disk, axis_square, regular_polygon, c_sigma, c_one, lens, custom_profile };

inline std::string to_string(BodyKind k) {
  switch (k) {
    case BodyKind::disk: return "disk";
    case BodyKind::axis_square: return "axis_square";
    case BodyKind::regular_polygon: return "regular_polygon";
    case BodyKind::c_sigma: return "c_sigma";
    case BodyKind::c_one: return "c_one";
    case BodyKind::lens: return "lens";
    case BodyKind::custom_profile: return "custom_profile";
  }
  return "unknown";
}

inline BodyKind body_kind_from_string(const std::string& s) {
  for (BodyKind k : {BodyKind::disk, BodyKind::axis_square, BodyKind::regular_polygon,
                     BodyKind::c_sigma, BodyKind::c_one, BodyKind::lens,
                     BodyKind::custom_profile}) {
    if (to_string(k) == s) return k;
  }
  if (s == "square") return BodyKind::axis_square;
  if (s == "polygon") return BodyKind::regular_polygon;
  throw std::invalid_argument("unknown body kind: " + s);
}

/// One sample of a support function: h(θ) = sup over the body of x·Θ.
struct SupportSample {
  double theta = 0.0;
  double h = 0.0;
};

struct BodySpec {
  BodyKind kind = BodyKind::disk;
  double radius = 0.25;        // disk
  double side = 0.5;           // axis_square
  int vertices = 6;            // regular_polygon
  double circumradius = 0.3;   // regular_polygon
  double sigma = 0.75;         // c_sigma, lens
  std::vector<SupportSample> support;  // custom_profile
  Vec2 center{};

  static BodySpec disk(double r) { BodySpec s; s.kind = BodyKind::disk; s.radius = r; return s; }
  static BodySpec axis_square(double side) {
    BodySpec s; s.kind = BodyKind::axis_square; s.side = side; return s;
  }
  static BodySpec regular_polygon(int k, double circumradius) {
    BodySpec s; s.kind = BodyKind::regular_polygon; s.vertices = k; s.circumradius = circumradius;
    return s;
  }
  static BodySpec c_sigma(double sigma) {
    BodySpec s; s.kind = BodyKind::c_sigma; s.sigma = sigma; return s;
  }
  static BodySpec c_one() { BodySpec s; s.kind = BodyKind::c_one; return s; }
  static BodySpec lens(double sigma) {
    BodySpec s; s.kind = BodyKind::lens; s.sigma = sigma; return s;
  }
  static BodySpec custom_profile(std::vector<SupportSample> samples) {
    BodySpec s; s.kind = BodyKind::custom_profile; s.support = std::move(samples); return s;
  }
};

/// Canonical one-line form `kind=...,param=...` (17 significant digits).
inline std::string to_string(const BodySpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << to_string(s.kind);
  switch (s.kind) {
    case BodyKind::disk: os << ",r=" << s.radius; break;
    case BodyKind::axis_square: os << ",side=" << s.side; break;
    case BodyKind::regular_polygon: os << ",k=" << s.vertices << ",R=" << s.circumradius; break;
    case BodyKind::c_sigma:
    case BodyKind::lens: os << ",sigma=" << s.sigma; break;
    case BodyKind::c_one: break;
    case BodyKind::custom_profile:
      os << ",support=\"";
      for (std::size_t i = 0; i < s.support.size(); ++i) {
        os << (i ? " " : "") << s.support[i].theta << ":" << s.support[i].h;
      }
      os << "\"";
      break;
  }
  if (s.center.x != 0.0 || s.center.y != 0.0) os << ",cx=" << s.center.x << ",cy=" << s.center.y;
  return os.str();
}

/// Families normalized by the constructor are scaled to this circumradius.
inline constexpr double kFamilyCircumradius = 0.45;
/// Start of the glued circular arc on the C_σ and C₁ constructions.
inline constexpr double kGlueAbscissa = 0.5;

struct BodyData {
  BodySpec spec;
  std::vector<Piece> pieces;
  double area = 0.0;
  double circumradius = 0.0;
  double inner_radius = 0.0;  // radius of a disk about the origin inside the body
  double scale = 1.0;         // global rescale applied after the raw construction
  bool mirror_symmetric = false;  // invariant under x → −x and y → −y
  bool has_flats = false;
  std::optional<double> disk_radius;
  std::vector<Vec2> polygon;  // CCW vertices for polygonal bodies
};

class Slicer;

/// Immutable planar convex body, stored centroid-centered; the BodySpec center is
/// applied as a translation by the free functions below.
class ConvexBody {
 public:
  explicit ConvexBody(std::shared_ptr<const BodyData> data);
  const BodySpec& spec() const { return data_->spec; }
  const std::vector<Piece>& pieces() const { return data_->pieces; }
  double area() const { return data_->area; }
  double circumradius() const { return data_->circumradius; }
  double inner_radius() const { return data_->inner_radius; }
  double scale() const { return data_->scale; }
  bool mirror_symmetric() const { return data_->mirror_symmetric; }
  bool has_flats() const { return data_->has_flats; }
  const std::optional<double>& disk_radius() const { return data_->disk_radius; }
  const std::vector<Vec2>& polygon() const { return data_->polygon; }
  Vec2 center() const { return data_->spec.center; }
  const std::shared_ptr<const BodyData>& data() const { return data_; }
  /// Slicer for Θ = (1, 0), used for membership tests.
  const Slicer& horizontal() const { return *horizontal_; }

 private:
  std::shared_ptr<const BodyData> data_;
  std::shared_ptr<const Slicer> horizontal_;
};

struct ChordSplit {
  double minus_len = 0.0;
  double plus_len = 0.0;
};

/// Geometry of the body seen along one direction: support interval, the two
/// boundary chains between the extreme points, and chord solvers. Works in the
/// centered frame of the body.
class Slicer {
 public:
  Slicer(std::shared_ptr<const BodyData> body, Direction dir);

  const Direction& direction() const { return dir_; }
  double A() const { return A_; }
  double B() const { return B_; }
  double width() const { return B_ - A_; }
  /// Contact point of the support line at A (midpoint of the contact set).
  Vec2 contact() const { return (flat_r_ + flat_l_) * 0.5; }

  /// Boundary points at depth δ ∈ [0, B−A] on the right-hand (increasing) and
  /// left-hand chains.
  std::pair<Vec2, Vec2> chord_points(double delta) const;
  double chord(double delta) const {
    const auto [r, l] = chord_points(delta);
    return norm(r - l);
  }
  ChordSplit split(double delta) const {
    const auto [r, l] = chord_points(delta);
    const Vec2 nrm = dir_.normal();
    const double pc = dot(contact(), nrm);
    const double a = dot(r, nrm) - pc;
    const double b = dot(l, nrm) - pc;
    const double lo = std::min(a, b), hi = std::max(a, b);
    return {std::max(0.0, -lo) - std::max(0.0, -hi), std::max(0.0, hi) - std::max(0.0, lo)};
  }
  /// Slice length at level t (centered frame); zero outside [A, B].
  double profile(double t) const {
    if (t < A_ || t > B_) return 0.0;
    return chord(std::clamp(t - A_, 0.0, B_ - A_));
  }
  /// Profile at ascending levels ts, reusing the previous root as a start.
  std::vector<double> profile_sweep(std::span<const double> ts) const;
  /// Levels in (A, B) where the slicing line passes a piece junction.
  std::vector<double> breakpoints() const;

 private:
  struct Sub {
    std::size_t piece;
    double s0, s1;
    double d0, d1;  // depths (x − contact)·Θ at s0 and s1
  };
  double depth(std::size_t piece, double s) const {
    return dot(piece_point(body_->pieces[piece], s) - pmin_, dir_.unit());
  }
  double solve(const Sub& sub, double delta, double guess) const;
  static std::size_t find_rising(const std::vector<Sub>& chain, double delta);
  static std::size_t find_falling(const std::vector<Sub>& chain, double delta);

  std::shared_ptr<const BodyData> body_;
  Direction dir_;
  double A_ = 0.0, B_ = 0.0;
  Vec2 pmin_, pmax_;
  std::vector<Sub> right_, left_;
  Vec2 flat_r_, flat_l_, top_r_, top_l_;
  double flat_tol_ = 0.0;
};

// ---------------------------------------------------------------------------
// Slicer implementation.

inline Slicer::Slicer(std::shared_ptr<const BodyData> body, Direction dir)
    : body_(std::move(body)), dir_(dir) {
  const auto& pcs = body_->pieces;
  const Vec2 u = dir_.unit();
  struct Cand {
    std::size_t piece;
    double s;
    double f;
  };
  Cand lo{0, 0.0, kInf}, hi{0, 0.0, -kInf};
  auto consider = [&](std::size_t i, double s) {
    const double f = dot(piece_point(pcs[i], s), u);
    if (f < lo.f) lo = {i, s, f};
    if (f > hi.f) hi = {i, s, f};
  };
  for (std::size_t i = 0; i < pcs.size(); ++i) {
    consider(i, 0.0);
    consider(i, 1.0);
    auto g = [&](double s) { return dot(piece_tangent(pcs[i], s), u); };
    const double g0 = g(0.0), g1 = g(1.0);
    if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) consider(i, bisect_sign(g, 0.0, 1.0));
  }
  A_ = lo.f;
  B_ = hi.f;
  pmin_ = piece_point(pcs[lo.piece], lo.s);
  pmax_ = piece_point(pcs[hi.piece], hi.s);

  auto walk = [&](std::size_t i0, double s0, std::size_t i1, double s1) {
    std::vector<Sub> out;
    std::size_t i = i0;
    double s = s0;
    for (std::size_t guard = 0; guard <= pcs.size() + 1; ++guard) {
      if (i == i1 && s1 >= s) {
        if (s1 > s) out.push_back({i, s, s1, 0.0, 0.0});
        break;
      }
      if (s < 1.0) out.push_back({i, s, 1.0, 0.0, 0.0});
      i = (i + 1) % pcs.size();
      s = 0.0;
    }
    for (auto& sb : out) {
      sb.d0 = depth(sb.piece, sb.s0);
      sb.d1 = depth(sb.piece, sb.s1);
    }
    return out;
  };
  right_ = walk(lo.piece, lo.s, hi.piece, hi.s);
  left_ = walk(hi.piece, hi.s, lo.piece, lo.s);
  // Enforce monotone depth tables against rounding.
  double run = 0.0;
  for (auto& sb : right_) {
    sb.d0 = run = std::max(run, sb.d0);
    sb.d1 = run = std::max(run, sb.d1);
  }
  run = B_ - A_;
  for (auto& sb : left_) {
    sb.d0 = run = std::min(run, sb.d0);
    sb.d1 = run = std::min(run, sb.d1);
  }

  flat_tol_ = 1e-12 * (B_ - A_);
  const double w = B_ - A_;
  flat_r_ = pmin_;
  for (const auto& sb : right_) {
    if (sb.d1 > flat_tol_) break;
    flat_r_ = piece_point(pcs[sb.piece], sb.s1);
  }
  flat_l_ = pmin_;
  for (auto it = left_.rbegin(); it != left_.rend(); ++it) {
    if (it->d0 > flat_tol_) break;
    flat_l_ = piece_point(pcs[it->piece], it->s0);
  }
  top_r_ = pmax_;
  for (auto it = right_.rbegin(); it != right_.rend(); ++it) {
    if (w - it->d0 > flat_tol_) break;
    top_r_ = piece_point(pcs[it->piece], it->s0);
  }
  top_l_ = pmax_;
  for (const auto& sb : left_) {
    if (w - sb.d1 > flat_tol_) break;
    top_l_ = piece_point(pcs[sb.piece], sb.s1);
  }
}

inline std::size_t Slicer::find_rising(const std::vector<Sub>& chain, double delta) {
  auto it = std::lower_bound(chain.begin(), chain.end(), delta,
                             [](const Sub& s, double d) { return s.d1 < d; });
  return it == chain.end() ? chain.size() - 1 : static_cast<std::size_t>(it - chain.begin());
}

inline std::size_t Slicer::find_falling(const std::vector<Sub>& chain, double delta) {
  auto it = std::lower_bound(chain.begin(), chain.end(), delta,
                             [](const Sub& s, double d) { return s.d1 > d; });
  return it == chain.end() ? chain.size() - 1 : static_cast<std::size_t>(it - chain.begin());
}

inline double Slicer::solve(const Sub& sb, double delta, double guess) const {
  const Piece& pc = body_->pieces[sb.piece];
  const Vec2 u = dir_.unit();
  const double w = B_ - A_;
  const bool from_top = delta > 0.5 * w;
  // Residual measured from the nearer support line keeps relative accuracy.
  auto fd = [&](double s) {
    const auto [pnt, tan] = piece_jet(pc, s);
    const double d = from_top ? (w - delta) - dot(pmax_ - pnt, u) : dot(pnt - pmin_, u) - delta;
    return std::pair{d, dot(tan, u)};
  };
  return bracketed_newton(fd, sb.s0, sb.s1, sb.d0 - delta, sb.d1 - delta, guess);
}

inline std::pair<Vec2, Vec2> Slicer::chord_points(double delta) const {
  const double w = B_ - A_;
  if (delta <= 0.0) return {flat_r_, flat_l_};
  if (delta >= w) return {top_r_, top_l_};
  const auto& pcs = body_->pieces;
  const Sub& r = right_[find_rising(right_, delta)];
  const Sub& l = left_[find_falling(left_, delta)];
  auto guess = [&](const Sub& sb) {
    const double span = sb.d1 - sb.d0;
    return span != 0.0 ? sb.s0 + (sb.s1 - sb.s0) * (delta - sb.d0) / span : sb.s0;
  };
  return {piece_point(pcs[r.piece], solve(r, delta, guess(r))),
          piece_point(pcs[l.piece], solve(l, delta, guess(l)))};
}

inline std::vector<double> Slicer::profile_sweep(std::span<const double> ts) const {
  std::vector<double> out(ts.size(), 0.0);
  const auto& pcs = body_->pieces;
  const double w = B_ - A_;
  // Depth rises along the right chain and falls along the left chain, so the
  // right cursor moves forward and the left cursor backward. Each start value
  // is the secant extrapolation of the last two roots on the same piece.
  struct Track {
    double d1 = -1.0, s1 = 0.0, d2 = -1.0, s2 = 0.0;
    void reset(double s) { *this = {-1.0, s, -1.0, s}; }
    double guess(double d) const {
      if (d2 < 0.0 || d1 == d2) return s1;
      return s1 + (s1 - s2) * (d - d1) / (d1 - d2);
    }
    void push(double d, double s) {
      d2 = d1;
      s2 = s1;
      d1 = d;
      s1 = s;
    }
  };
  std::size_t ir = 0, il = left_.empty() ? 0 : left_.size() - 1;
  Track tr, tl;
  tr.reset(right_.empty() ? 0.0 : right_.front().s0);
  tl.reset(left_.empty() ? 0.0 : left_.back().s1);
  double sr = 0.0, sl = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    if (t < A_ || t > B_) continue;
    const double delta = t - A_;
    if (delta <= 0.0 || delta >= w) {
      out[k] = chord(std::clamp(delta, 0.0, w));
      continue;
    }
    while (ir + 1 < right_.size() && right_[ir].d1 < delta) {
      ++ir;
      tr.reset(right_[ir].s0);
    }
    while (il > 0 && left_[il].d0 < delta) {
      --il;
      tl.reset(left_[il].s1);
    }
    sr = solve(right_[ir], delta, tr.guess(delta));
    sl = solve(left_[il], delta, tl.guess(delta));
    tr.push(delta, sr);
    tl.push(delta, sl);
    out[k] = norm(piece_point(pcs[right_[ir].piece], sr) - piece_point(pcs[left_[il].piece], sl));
  }
  return out;
}

inline std::vector<double> Slicer::breakpoints() const {
  std::vector<double> b;
  const double tol = 1e-9 * (B_ - A_);
  for (const auto& pc : body_->pieces) {
    const double t = dot(piece_point(pc, 0.0), dir_.unit());
    if (t > A_ + tol && t < B_ - tol) b.push_back(t);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [&](double x, double y) { return y - x <= tol; }),
          b.end());
  return b;
}

inline ConvexBody::ConvexBody(std::shared_ptr<const BodyData> data)
    : data_(std::move(data)),
      horizontal_(std::make_shared<const Slicer>(data_, Direction::from_vector({1.0, 0.0}))) {}

// ---------------------------------------------------------------------------
// Construction.

namespace detail {

inline std::vector<Piece> circle_pieces(double r) {
  std::vector<Piece> p;
  for (int q = 0; q < 4; ++q) {
    p.emplace_back(Arc{{0.0, 0.0}, r, 0.5 * kPi * q, 0.5 * kPi * (q + 1)});
  }
  return p;
}

inline std::vector<Piece> polygon_pieces(const std::vector<Vec2>& v) {
  std::vector<Piece> p;
  for (std::size_t i = 0; i < v.size(); ++i) p.emplace_back(Segment{v[i], v[(i + 1) % v.size()]});
  return p;
}

/// Graph φ on [0, x0] at the lower pole, glued to a circular arc tangent at
/// (x0, φ(x0)) whose centre lies on the x-axis, then reflected in both axes.
inline std::vector<Piece> glued_pieces(double p, double c2, double c1) {
  const double x0 = kGlueAbscissa;
  const PowerGraph base{1.0, 1.0, 1.0, p, c2, c1, -1.0, 0.0, x0};
  const double y0 = base.phi(x0);
  const double m0 = base.dphi(x0);
  const double radius = -y0 * std::sqrt(1.0 + m0 * m0);
  const double cx = x0 + y0 * m0;
  const double pa = std::atan2(y0, x0 - cx);  // in (−π/2, 0)
  auto graph = [&](double sx, double sy, double from, double to) {
    PowerGraph g = base;
    g.sx = sx;
    g.sy = sy;
    g.u0 = from;
    g.u1 = to;
    return g;
  };
  return {graph(1, 1, 0, x0),
          Arc{{cx, 0.0}, radius, pa, 0.0},
          Arc{{cx, 0.0}, radius, 0.0, -pa},
          graph(1, -1, x0, 0),
          graph(-1, -1, 0, x0),
          Arc{{-cx, 0.0}, radius, kPi + pa, kPi},
          Arc{{-cx, 0.0}, radius, kPi, kPi - pa},
          graph(-1, 1, x0, 0)};
}

inline std::vector<Piece> lens_pieces(double p) {
  const PowerGraph base{1.0, 1.0, 1.0, p, 1.0, 0.0, -1.0, 0.0, 1.0};
  auto graph = [&](double sx, double sy, double from, double to) {
    PowerGraph g = base;
    g.sx = sx;
    g.sy = sy;
    g.u0 = from;
    g.u1 = to;
    return g;
  };
  return {graph(1, 1, 0, 1), graph(1, -1, 1, 0), graph(-1, -1, 0, 1), graph(-1, 1, 1, 0)};
}

inline void scale_pieces(std::vector<Piece>& pcs, double s) {
  for (auto& pc : pcs) {
    std::visit(
        [s](auto& q) {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, Segment>) {
            q.a = q.a * s;
            q.b = q.b * s;
          } else if constexpr (std::is_same_v<T, Arc>) {
            q.center = q.center * s;
            q.radius *= s;
          } else {
            q.scale *= s;
          }
        },
        pc);
  }
}

inline double max_radius(const std::vector<Piece>& pcs) {
  double best = 0.0;
  for (const auto& pc : pcs) {
    constexpr int kSamples = 512;
    int arg = 0;
    double local = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      const double r = norm(piece_point(pc, static_cast<double>(i) / kSamples));
      if (r > local) {
        local = r;
        arg = i;
      }
    }
    double a = std::max(0.0, (arg - 1.0) / kSamples), b = std::min(1.0, (arg + 1.0) / kSamples);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (norm(piece_point(pc, c)) > norm(piece_point(pc, d))) {
        b = d;
      } else {
        a = c;
      }
    }
    best = std::max({best, local, norm(piece_point(pc, 0.5 * (a + b)))});
  }
  return best;
}

/// Radius of a disk about the origin inside the inscribed polygon through
/// boundary samples (a subset of the body by convexity).
inline double inscribed_radius(const std::vector<Piece>& pcs) {
  std::vector<Vec2> pts;
  for (const auto& pc : pcs) {
    for (int i = 0; i < 64; ++i) pts.push_back(piece_point(pc, i / 64.0));
  }
  double r = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 a = pts[i], b = pts[(i + 1) % pts.size()];
    const double len = norm(b - a);
    if (len == 0.0) continue;
    r = std::min(r, std::abs(cross(b - a, -a)) / len);
  }
  return r;
}

/// Intersection of half-planes {x·Θ_i ≤ h_i}, by clipping a large square.
inline std::vector<Vec2> clip_support(const std::vector<SupportSample>& samples) {
  constexpr double kBox = 10.0;
  std::vector<Vec2> poly{{-kBox, -kBox}, {kBox, -kBox}, {kBox, kBox}, {-kBox, kBox}};
  for (const auto& smp : samples) {
    const Vec2 u{std::cos(smp.theta), std::sin(smp.theta)};
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
      const double fa = dot(a, u) - smp.h, fb = dot(b, u) - smp.h;
      if (fa <= 0.0) out.push_back(a);
      if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) out.push_back(a + (b - a) * (fa / (fa - fb)));
    }
    poly = std::move(out);
    if (poly.size() < 3) throw std::invalid_argument("custom_profile: empty support intersection");
  }
  // Drop near-duplicate vertices.
  std::vector<Vec2> clean;
  for (const Vec2& p : poly) {
    if (clean.empty() || norm(p - clean.back()) > 1e-13) clean.push_back(p);
  }
  while (clean.size() > 1 && norm(clean.front() - clean.back()) <= 1e-13) clean.pop_back();
  for (const Vec2& p : clean) {
    if (std::abs(p.x) >= kBox || std::abs(p.y) >= kBox) {
      throw std::invalid_argument("custom_profile: support samples do not bound a body");
    }
  }
  if (clean.size() < 3) throw std::invalid_argument("custom_profile: degenerate body");
  return clean;
}

}  // namespace detail

/// Builds the body; families are rescaled to circumradius kFamilyCircumradius
/// and any other body whose circumradius reaches 1/2 is rescaled likewise, so
/// the diameter is always < 1.
inline ConvexBody make_body(const BodySpec& spec) {
  auto data = std::make_shared<BodyData>();
  data->spec = spec;
  bool normalize = false;
  switch (spec.kind) {
    case BodyKind::disk:
      if (!(spec.radius > 0.0)) throw std::invalid_argument("disk: radius must be > 0");
      data->pieces = detail::circle_pieces(spec.radius);
      data->mirror_symmetric = true;
      break;
    case BodyKind::axis_square: {
      if (!(spec.side > 0.0)) throw std::invalid_argument("axis_square: side must be > 0");
      const double h = 0.5 * spec.side;
      data->polygon = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
      data->mirror_symmetric = true;
      break;
    }
    case BodyKind::regular_polygon: {
      if (spec.vertices < 3) throw std::invalid_argument("regular_polygon: need k >= 3");
      if (!(spec.circumradius > 0.0)) throw std::invalid_argument("regular_polygon: R must be > 0");
      for (int i = 0; i < spec.vertices; ++i) {
        const double a = kTwoPi * i / spec.vertices;
        data->polygon.push_back({spec.circumradius * std::cos(a), spec.circumradius * std::sin(a)});
      }
      data->mirror_symmetric = spec.vertices % 2 == 0;
      break;
    }
    case BodyKind::c_sigma:
      if (!(spec.sigma >= 0.5 && spec.sigma < 1.0)) {
        throw std::invalid_argument("c_sigma: sigma must lie in [1/2, 1)");
      }
      data->pieces = detail::glued_pieces(1.0 / spec.sigma, 1.0, 0.0);
      data->mirror_symmetric = true;
      normalize = true;
      break;
    case BodyKind::c_one:
      data->pieces = detail::glued_pieces(2.0, 0.75, 0.25);
      data->mirror_symmetric = true;
      normalize = true;
      break;
    case BodyKind::lens:
      if (!(spec.sigma >= 0.5 && spec.sigma < 1.0)) {
        throw std::invalid_argument("lens: sigma must lie in [1/2, 1)");
      }
      data->pieces = detail::lens_pieces(1.0 / spec.sigma);
      data->mirror_symmetric = true;
      normalize = true;
      break;
    case BodyKind::custom_profile: {
      if (spec.support.size() < 3) throw std::invalid_argument("custom_profile: need >= 3 samples");
      auto v = detail::clip_support(spec.support);
      // Centroid-center the polygon.
      double a2 = 0.0, cx = 0.0, cy = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 p = v[i], q = v[(i + 1) % v.size()];
        const double c = cross(p, q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
      }
      const Vec2 g{cx / (3.0 * a2), cy / (3.0 * a2)};
      for (auto& p : v) p = p - g;
      data->polygon = std::move(v);
      break;
    }
  }
  if (!data->polygon.empty()) {
    data->pieces = detail::polygon_pieces(data->polygon);
    data->has_flats = true;
  }
  const double raw = detail::max_radius(data->pieces);
  if (!(raw > 0.0) || !std::isfinite(raw)) throw std::invalid_argument("make_body: degenerate body");
  if (normalize || raw >= 0.5) {
    data->scale = kFamilyCircumradius / raw;
    detail::scale_pieces(data->pieces, data->scale);
    for (auto& p : data->polygon) p = p * data->scale;
  }
  if (spec.kind == BodyKind::disk) data->disk_radius = spec.radius * data->scale;
  for (const auto& pc : data->pieces) data->area += piece_green(pc);
  data->circumradius = detail::max_radius(data->pieces);
  data->inner_radius = detail::inscribed_radius(data->pieces);
  if (!(data->area > 0.0)) throw std::invalid_argument("make_body: nonpositive area");
  return ConvexBody(std::move(data));
}

// ---------------------------------------------------------------------------
// Free-function interface (absolute frame: includes the BodySpec center).

/// Slicer in the centered frame of the body.
inline Slicer slicer(const ConvexBody& body, Direction dir) { return Slicer(body.data(), dir); }

/// (A, B) with A = inf x·Θ and B = sup x·Θ over the body.
inline std::pair<double, double> support_interval(const ConvexBody& body, Direction dir) {
  const Slicer s = slicer(body, dir);
  const double c = dot(body.center(), dir.unit());
  return {s.A() + c, s.B() + c};
}

/// Length of the slice {x ∈ C : x·Θ = t}.
inline double profile(const ConvexBody& body, Direction dir, double t) {
  return slicer(body, dir).profile(t - dot(body.center(), dir.unit()));
}

/// |γ_Θ(δ)|: slice length at depth δ from the support line with normal Θ.
inline double chord(const ConvexBody& body, Direction dir, double delta) {
  const Slicer s = slicer(body, dir);
  if (delta < 0.0 || delta > s.width()) throw std::domain_error("chord: delta outside [0, B-A]");
  return s.chord(delta);
}

inline ChordSplit split_chord(const ConvexBody& body, Direction dir, double delta) {
  const Slicer s = slicer(body, dir);
  if (delta < 0.0 || delta > s.width()) {
    throw std::domain_error("split_chord: delta outside [0, B-A]");
  }
  return s.split(delta);
}

/// Closed membership (boundary points count as inside).
inline bool contains(const ConvexBody& body, Vec2 x) {
  const Vec2 p = x - body.center();
  const double r2 = dot(p, p);
  if (r2 <= body.inner_radius() * body.inner_radius()) return true;
  const double out = body.circumradius() * (1.0 + 1e-12);
  if (r2 > out * out) return false;
  const Slicer& h = body.horizontal();
  constexpr double kTol = 1e-12;
  if (p.x < h.A() - kTol || p.x > h.B() + kTol) return false;
  const auto [lower, upper] = h.chord_points(std::clamp(p.x - h.A(), 0.0, h.width()));
  return p.y >= std::min(lower.y, upper.y) - kTol && p.y <= std::max(lower.y, upper.y) + kTol;
}

struct MinChordReport {
  double c_hat = kInf;
  double worst_theta = 0.0;
  double worst_delta = 0.0;
  bool pass = false;
};

/// c_hat = min over the grid of chord(Θ, δ)/δ.
inline MinChordReport min_chord_scan(const ConvexBody& body, std::span<const double> thetas,
                                     std::span<const double> deltas) {
  MinChordReport rep;
  for (double th : thetas) {
    const Slicer s = slicer(body, Direction(th));
    for (double d : deltas) {
      if (!(d > 0.0) || d > s.width()) continue;
      const double r = s.chord(d) / d;
      if (r < rep.c_hat) {
        rep.c_hat = r;
        rep.worst_theta = th;
        rep.worst_delta = d;
      }
    }
  }
  rep.pass = rep.c_hat > 0.0 && std::isfinite(rep.c_hat);
  return rep;
}

/// min over directions of min(|γ⁻|, |γ⁺|) at depth δ: a uniform scan of
/// `scan` directions plus the coordinate axes, refined by golden section
/// around the best scan point.
inline double min_split_over_directions(const ConvexBody& body, double delta, int scan = 1440) {
  auto objective = [&](const Direction& d) {
    const Slicer s = slicer(body, d);
    if (delta > s.width()) return kInf;
    const ChordSplit sp = s.split(delta);
    return std::min(sp.minus_len, sp.plus_len);
  };
  double best = kInf, best_th = 0.0;
  for (Vec2 axis : {Vec2{1, 0}, Vec2{0, 1}, Vec2{-1, 0}, Vec2{0, -1}}) {
    const Direction d = Direction::from_vector(axis);
    const double v = objective(d);
    if (v < best) {
      best = v;
      best_th = d.theta();
    }
  }
  for (int i = 0; i < scan; ++i) {
    const double th = kTwoPi * i / scan;
    const double v = objective(Direction(th));
    if (v < best) {
      best = v;
      best_th = th;
    }
  }
  double a = best_th - kTwoPi / scan, b = best_th + kTwoPi / scan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (objective(Direction(c)) < objective(Direction(d))) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::min(best, objective(Direction(0.5 * (a + b))));
}

struct HolderReport {
  double alpha_hat = 0.0;
  double slope = 0.0;
  std::vector<double> deltas;
  std::vector<double> min_split;
};

/// Least-squares slope s of log min-split versus log δ; α_hat = 1/s − 1.
inline HolderReport holder_estimate(const ConvexBody& body, std::span<const double> deltas) {
  if (deltas.size() < 3) throw std::invalid_argument("holder_estimate: need >= 3 grid points");
  HolderReport rep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double d : deltas) {
    const double m = min_split_over_directions(body, d);
    if (!(m > 0.0)) throw std::invalid_argument("holder_estimate: degenerate split at grid point");
    rep.deltas.push_back(d);
    rep.min_split.push_back(m);
    const double x = std::log(d), y = std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(deltas.size());
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw std::invalid_argument("holder_estimate: degenerate fit");
  rep.slope = (n * sxy - sx * sy) / den;
  rep.alpha_hat = 1.0 / rep.slope - 1.0;
  return rep;
}

}  // namespace disclab
