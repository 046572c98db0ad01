#pragma once

// Fourier transforms of body indicators and of normalized profile functions,
// the majorant μ_f, second differences and ω₂, and the inequality verifiers
// built on them.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "disclab/geometry.hpp"
#include "disclab/numeric.hpp"

namespace disclab {

// ---------------------------------------------------------------------------
// Profile functions on [−1, 1].

/// Nonnegative concave function on [−1, 1], zero outside. Body profiles keep
/// the affine map x ↦ (A+B)/2 + x(B−A)/2 back to the level t along Θ.
class ProfileFunction {
 public:
  using Fn = std::function<double(double)>;

  explicit ProfileFunction(Fn f, std::vector<double> kinks = {}, std::string label = "custom")
      : fn_(std::move(f)), kinks_(std::move(kinks)), label_(std::move(label)) {
    std::sort(kinks_.begin(), kinks_.end());
  }

  static ProfileFunction tent() {
    return ProfileFunction([](double x) { return 1.0 - std::abs(x); }, {0.0}, "tent");
  }
  static ProfileFunction semicircle() {
    return ProfileFunction([](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); }, {},
                           "semicircle");
  }
  static ProfileFunction constant(double value = 1.0) {
    return ProfileFunction([value](double) { return value; }, {}, "constant");
  }

  double operator()(double x) const {
    if (x < -1.0 || x > 1.0) return 0.0;
    if (slicer_) return slicer_->profile(level(x));
    return fn_(x);
  }

  /// Values at ascending abscissae; body profiles use a warm-started sweep.
  std::vector<double> values(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    if (slicer_) {
      std::vector<double> ts(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        ts[i] = (xs[i] < -1.0 || xs[i] > 1.0) ? slicer_->A() - 1.0 : level(xs[i]);
      }
      if (std::is_sorted(ts.begin(), ts.end())) return slicer_->profile_sweep(ts);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
    return out;
  }

  /// Interior abscissae in (−1, 1) where f may fail to be smooth.
  std::span<const double> kinks() const { return kinks_; }
  const std::string& label() const { return label_; }
  /// Support interval [A, B] of the underlying slice function (absolute frame).
  double A() const { return A_; }
  double B() const { return B_; }
  const std::optional<Direction>& direction() const { return direction_; }

  /// n+1 samples at x_j = −1 + 2j/n.
  std::vector<double> tabulate(std::size_t n) const {
    std::vector<double> xs(n + 1);
    for (std::size_t j = 0; j <= n; ++j) xs[j] = -1.0 + 2.0 * static_cast<double>(j) / n;
    xs.back() = 1.0;
    return values(xs);
  }

 private:
  friend ProfileFunction normalize_profile(const ConvexBody& body, Direction dir);
  ProfileFunction() = default;

  /// Centered-frame level of x ∈ [−1, 1]; the endpoints map exactly to A, B.
  double level(double x) const {
    if (x <= -1.0) return slicer_->A();
    if (x >= 1.0) return slicer_->B();
    return std::clamp(mid_ + x * half_, slicer_->A(), slicer_->B());
  }

  Fn fn_;
  std::shared_ptr<const Slicer> slicer_;
  double mid_ = 0.0, half_ = 1.0;  // centered-frame affine map
  double A_ = -1.0, B_ = 1.0;
  std::optional<Direction> direction_;
  std::vector<double> kinks_;
  std::string label_;
};

/// f(x) = profile(body, Θ, (A+B)/2 + x(B−A)/2).
inline ProfileFunction normalize_profile(const ConvexBody& body, Direction dir) {
  ProfileFunction f;
  f.slicer_ = std::make_shared<const Slicer>(body.data(), dir);
  const Slicer& s = *f.slicer_;
  f.mid_ = 0.5 * (s.A() + s.B());
  f.half_ = 0.5 * (s.B() - s.A());
  const double shift = dot(body.center(), dir.unit());
  f.A_ = s.A() + shift;
  f.B_ = s.B() + shift;
  f.direction_ = dir;
  for (double t : s.breakpoints()) f.kinks_.push_back((t - f.mid_) / f.half_);
  f.label_ = to_string(body.spec().kind);
  return f;
}

// ---------------------------------------------------------------------------
// Majorant, second differences, modulus of smoothness.

namespace detail {
inline double majorant(const ProfileFunction& f, double h) {
  const double a = std::abs(h);
  return std::max(f(-1.0 + a), f(1.0 - a));
}
}  // namespace detail

/// μ_f(h) = max{f(−1+|h|), f(1−|h|)} for 0 < |h| < 1/2.
inline double mu(const ProfileFunction& f, double h) {
  if (!(std::abs(h) < 0.5)) throw std::domain_error("mu: |h| must be < 1/2");
  return detail::majorant(f, h);
}

/// ‖Δ²_h f‖_{L²(R)} with Δ²_h f(x) = f(x+2h) − 2f(x+h) + f(x). Gauss panels
/// are at most |h|/4 wide within 2|h| of every point where a shifted copy of
/// f has an endpoint or kink, and grow geometrically away from them.
inline double second_diff_l2(const ProfileFunction& f, double h) {
  h = std::abs(h);
  if (h == 0.0) return 0.0;
  std::vector<double> events{-1.0, 1.0};
  for (double k : f.kinks()) events.push_back(k);
  std::vector<double> cuts;
  const double lo = -1.0 - 2.0 * h, hi = 1.0;
  for (double e : events) {
    for (double shift : {0.0, h, 2.0 * h}) {
      const double c = e - shift;
      if (c >= lo && c <= hi) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a <= 1e-14 * h; }),
             cuts.end());
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& gx = rule::abscissa();
  const auto& gw = rule::weights();
  std::vector<double> nodes, weights;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const auto mesh = graded_mesh(cuts[c], cuts[c + 1], 1.0 / 64.0, 0.25, 0.25 * h, 2.0 * h);
    for (std::size_t p = 0; p + 1 < mesh.size(); ++p) {
      const double m = 0.5 * (mesh[p] + mesh[p + 1]), r = 0.5 * (mesh[p + 1] - mesh[p]);
      // Ascending node order within the panel.
      for (std::size_t i = gx.size(); i-- > 0;) {
        if (gx[i] == 0.0) continue;
        nodes.push_back(m - r * gx[i]);
        weights.push_back(r * gw[i]);
      }
      if (gx[0] == 0.0) {
        nodes.push_back(m);
        weights.push_back(r * gw[0]);
      }
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if (gx[i] == 0.0) continue;
        nodes.push_back(m + r * gx[i]);
        weights.push_back(r * gw[i]);
      }
    }
  }
  std::vector<double> x1(nodes.size()), x2(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x1[i] = nodes[i] + h;
    x2[i] = nodes[i] + 2.0 * h;
  }
  const auto f0 = f.values(nodes), f1 = f.values(x1), f2 = f.values(x2);
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = f2[i] - 2.0 * f1[i] + f0[i];
    terms[i] = weights[i] * d * d;
  }
  return std::sqrt(pairwise_sum(terms));
}

/// ω₂(f, ν) = max of second_diff_l2 over h = ν·2^{−k/8}, k = 0..63.
inline double omega2(const ProfileFunction& f, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("omega2: nu must be > 0");
  double best = 0.0;
  for (int k = 0; k < 64; ++k) best = std::max(best, second_diff_l2(f, nu * std::exp2(-k / 8.0)));
  return best;
}

// ---------------------------------------------------------------------------
// Filon quadrature.

/// Weights (W₋₁, W₀, W₁) with ∫_{−1}^{1} P(u) e^{−iθu} du = ΣW_k P(k) for the
/// quadratic P through u = −1, 0, 1.
inline std::array<cplx, 3> filon_weights(double theta) {
  double m0, m2, m1i;  // m1 = −i·m1i
  if (std::abs(theta) < 0.1) {
    const double t2 = theta * theta;
    m0 = 2.0 * (1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0);
    m1i = 2.0 * theta * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0 - t2 * t2 * t2 / 45360.0);
    m2 = 2.0 * (1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0 - t2 * t2 * t2 / 6480.0);
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    m0 = 2.0 * s / theta;
    m1i = 2.0 * (s - theta * c) / (theta * theta);
    m2 = 2.0 * ((theta * theta - 2.0) * s + 2.0 * theta * c) / (theta * theta * theta);
  }
  const cplx m1{0.0, -m1i};
  return {(m2 - m1) * 0.5, cplx{m0 - m2, 0.0}, (m2 + m1) * 0.5};
}

/// e^{−2πi·x} with the argument reduced modulo 1 first.
inline cplx unit_phase(double x) {
  const double r = x - std::round(x);
  return std::polar(1.0, -kTwoPi * r);
}

/// f̂(s) = ∫ f(x) e^{−2πisx} dx by composite Filon quadrature on a mesh with
/// panels ≤ min(2^−10, 1/(8|s|)) graded toward the endpoints and kinks.
inline cplx ft_profile(const ProfileFunction& f, double s) {
  const double coarse = std::min(1.0 / 1024.0, s != 0.0 ? 1.0 / (8.0 * std::abs(s)) : 1.0);
  std::vector<double> cuts{-1.0};
  for (double k : f.kinks()) {
    if (k > -1.0 && k < 1.0) cuts.push_back(k);
  }
  cuts.push_back(1.0);
  std::vector<double> xs;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const auto mesh = graded_mesh(cuts[c], cuts[c + 1], coarse, 0.25);
    for (std::size_t p = 0; p + 1 < mesh.size(); ++p) {
      xs.push_back(mesh[p]);
      xs.push_back(0.5 * (mesh[p] + mesh[p + 1]));
    }
  }
  xs.push_back(1.0);
  const auto v = f.values(xs);
  const double omega = kTwoPi * s;
  std::vector<cplx> terms;
  terms.reserve(xs.size() / 2);
  for (std::size_t i = 0; i + 2 < xs.size(); i += 2) {
    const double w = 0.5 * (xs[i + 2] - xs[i]);
    const double c = xs[i + 1];
    const auto W = filon_weights(omega * w);
    terms.push_back(w * unit_phase(s * c) * (W[0] * v[i] + W[1] * v[i + 1] + W[2] * v[i + 2]));
  }
  return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Closed forms.

/// FT of the centered disk of radius r: r·J₁(2πr|ξ|)/|ξ|.
inline double ft_disk(double r, double rho) {
  if (rho == 0.0) return kPi * r * r;
  return r * std::cyl_bessel_j(1.0, kTwoPi * r * rho) / rho;
}

/// FT of a polygon with CCW vertices, by the divergence theorem over edges.
inline cplx ft_polygon(std::span<const Vec2> v, Vec2 xi) {
  const double xi2 = dot(xi, xi);
  std::vector<cplx> terms;
  terms.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], e = v[(i + 1) % v.size()] - a;
    const double z = -kTwoPi * dot(xi, e);  // E(iz) = (e^{iz} − 1)/(iz)
    cplx E;
    if (std::abs(z) < 1e-3) {
      E = cplx{1.0 - z * z / 6.0 + z * z * z * z / 120.0, z / 2.0 - z * z * z / 24.0};
    } else {
      E = (std::polar(1.0, z) - 1.0) / cplx{0.0, z};
    }
    terms.push_back(cross(xi, e) * unit_phase(dot(xi, a)) * E);
  }
  return cplx{0.0, 1.0} / (kTwoPi * xi2) * pairwise_sum(terms);
}

/// χ̂_C(ξ) = ∫_C e^{−2πiξ·x} dx.
inline cplx ft_body(const ConvexBody& body, Vec2 xi) {
  const double rho = norm(xi);
  if (rho == 0.0) return body.area();
  const cplx phase = unit_phase(dot(xi, body.center()));
  if (body.disk_radius()) return ft_disk(*body.disk_radius(), rho) * phase;
  if (!body.polygon().empty() && rho * body.circumradius() > 1e-3) {
    return ft_polygon(body.polygon(), xi) * phase;
  }
  const Direction dir = Direction::from_vector(xi);
  const ProfileFunction f = normalize_profile(body, dir);
  const double half = 0.5 * (f.B() - f.A());
  return half * unit_phase(0.5 * rho * (f.A() + f.B())) * ft_profile(f, rho * half);
}

// ---------------------------------------------------------------------------
// Filon-FFT spectra.

namespace detail {

/// Thread-safe cache of FFTW real-to-complex plans keyed by length.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }
  fftw_plan r2c(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

struct FftwReal {
  explicit FftwReal(std::size_t n) : p(fftw_alloc_real(n)), size(n) { std::fill(p, p + n, 0.0); }
  ~FftwReal() { fftw_free(p); }
  FftwReal(const FftwReal&) = delete;
  FftwReal& operator=(const FftwReal&) = delete;
  double* p;
  std::size_t size;
};

struct FftwComplex {
  explicit FftwComplex(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~FftwComplex() { fftw_free(p); }
  FftwComplex(const FftwComplex&) = delete;
  FftwComplex& operator=(const FftwComplex&) = delete;
  fftw_complex* p;
  cplx at(std::size_t q) const { return {p[q][0], p[q][1]}; }
};

/// ∫ g(t) e^{−2πiρt} dt over [a, a + n·h] for ρ_q = q/(os·n·h), q = 0..q_max,
/// from samples g_j = g(a + jh), j = 0..n (n even), by composite Filon on
/// panels [t_{2k}, t_{2k+2}] evaluated with two zero-padded FFTs.
inline std::vector<cplx> filon_fft(std::span<const double> g, double a, double h, std::size_t os,
                                   std::size_t q_max) {
  const std::size_t n = g.size() - 1;
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("filon_fft: need an even panel count");
  const std::size_t n_fft = os * n;
  if (q_max > n_fft / 2) throw std::invalid_argument("filon_fft: q_max beyond Nyquist");
  FftwReal even(n_fft), odd(n_fft);
  for (std::size_t j = 1; j < n; ++j) (j % 2 == 0 ? even.p : odd.p)[j] = g[j];
  FftwComplex E(n_fft / 2 + 1), O(n_fft / 2 + 1);
  const fftw_plan plan = FftPlans::instance().r2c(static_cast<int>(n_fft));
  fftw_execute_dft_r2c(plan, even.p, E.p);
  fftw_execute_dft_r2c(plan, odd.p, O.p);
  std::vector<cplx> out(q_max + 1);
  const double dn = static_cast<double>(n_fft);
  // e^{−iω_q·n·h} = e^{−2πiq/os} repeats with period os.
  std::vector<cplx> tail(os);
  for (std::size_t r = 0; r < os; ++r) tail[r] = unit_phase(static_cast<double>(r) / os);
  for (std::size_t q = 0; q <= q_max; ++q) {
    const double theta = kTwoPi * static_cast<double>(q) / dn;
    const auto W = filon_weights(theta);
    const cplx ep = std::polar(1.0, theta), em = std::conj(ep);
    const double rho = static_cast<double>(q) / (dn * h);
    const cplx body = W[1] * O.at(q) + (W[0] * em + W[2] * ep) * E.at(q) + W[0] * em * g[0] +
                      W[2] * ep * g[n] * tail[q % os];
    out[q] = h * unit_phase(rho * a) * body;
  }
  return out;
}

}  // namespace detail

enum class SpectrumMethod { closed_form, quadrature, fft_of_profile };

inline std::string to_string(SpectrumMethod m) {
  switch (m) {
    case SpectrumMethod::closed_form: return "closed_form";
    case SpectrumMethod::quadrature: return "quadrature";
    case SpectrumMethod::fft_of_profile: return "fft_of_profile";
  }
  return "unknown";
}

/// Samples of a 1-D transform on the uniform grid ρ_k = k·Δρ, k = 0..n−1.
struct RaySpectrum {
  Direction direction{0.0};
  double delta_rho = 0.0;
  std::vector<double> rho;
  std::vector<cplx> ft;
  SpectrumMethod method = SpectrumMethod::fft_of_profile;

  double rho_max() const { return rho.empty() ? 0.0 : rho.back(); }

  /// Cubic Lagrange interpolation on the four nearest grid points.
  cplx at(double r) const {
    if (r < 0.0 || r > rho_max()) throw std::domain_error("RaySpectrum::at: radius out of range");
    const auto n = static_cast<std::ptrdiff_t>(rho.size());
    const double x = r / delta_rho;
    auto k = static_cast<std::ptrdiff_t>(std::floor(x));
    k = std::clamp<std::ptrdiff_t>(k - 1, 0, std::max<std::ptrdiff_t>(0, n - 4));
    cplx s = 0.0;
    for (std::ptrdiff_t i = k; i < std::min(n, k + 4); ++i) {
      double l = 1.0;
      for (std::ptrdiff_t j = k; j < std::min(n, k + 4); ++j) {
        if (j != i) l *= (x - static_cast<double>(j)) / static_cast<double>(i - j);
      }
      s += l * ft[static_cast<std::size_t>(i)];
    }
    return s;
  }

  /// ∫_lo^hi ρ^power |χ̂(ρ)|² dρ by the trapezoid rule on the grid, with partial
  /// end cells from interpolated values.
  double weighted_abs2(double lo, double hi, int power) const {
    if (!(hi > lo)) return 0.0;
    if (hi > rho_max() * (1.0 + 1e-12)) {
      throw std::domain_error("RaySpectrum::weighted_abs2: beyond spectrum range");
    }
    hi = std::min(hi, rho_max());
    auto integrand_at = [&](double r) { return std::pow(r, power) * std::norm(at(r)); };
    auto integrand_k = [&](std::size_t k) { return std::pow(rho[k], power) * std::norm(ft[k]); };
    const auto k0 = static_cast<std::size_t>(std::ceil(lo / delta_rho));
    const auto k1 = static_cast<std::size_t>(std::floor(hi / delta_rho));
    if (k0 > k1) return 0.5 * (hi - lo) * (integrand_at(lo) + integrand_at(hi));
    std::vector<double> terms;
    terms.push_back(0.5 * (rho[k0] - lo) * (integrand_at(lo) + integrand_k(k0)));
    for (std::size_t k = k0; k < k1; ++k) {
      terms.push_back(0.5 * delta_rho * (integrand_k(k) + integrand_k(k + 1)));
    }
    terms.push_back(0.5 * (hi - rho[k1]) * (integrand_k(k1) + integrand_at(hi)));
    return pairwise_sum(terms);
  }
};

/// Default panel count for dense profile sampling.
inline constexpr std::size_t kProfileNodes = std::size_t{1} << 16;

/// f̂(s_q) for s_q = q/(2·oversample), q = 0..⌊s_max/Δs⌋, from n+1 uniform
/// samples of f over [−1, 1] (n = 0 picks a power of two ≥ max(2^12, 8·s_max)).
inline RaySpectrum profile_spectrum(const ProfileFunction& f, double s_max, std::size_t oversample,
                                    std::size_t n = 0) {
  if (!(s_max > 0.0) || oversample < 1) throw std::invalid_argument("profile_spectrum: bad range");
  if (n == 0) n = next_pow2(std::max<std::size_t>(4096, static_cast<std::size_t>(8.0 * s_max)));
  const auto g = f.tabulate(n);
  const double h = 2.0 / static_cast<double>(n);
  RaySpectrum sp;
  sp.delta_rho = 1.0 / (static_cast<double>(oversample) * 2.0);
  const auto q_max = static_cast<std::size_t>(std::ceil(s_max / sp.delta_rho));
  sp.ft = detail::filon_fft(g, -1.0, h, oversample, q_max);
  for (std::size_t q = 0; q <= q_max; ++q) sp.rho.push_back(static_cast<double>(q) * sp.delta_rho);
  if (f.direction()) sp.direction = *f.direction();
  return sp;
}

/// χ̂_C(ρΘ) on ρ_k = k/(oversample·(B−A)) up to ρ_max, from the profile
/// sampled at n+1 uniform levels (n = 0 uses kProfileNodes).
inline RaySpectrum ray_spectrum(const ConvexBody& body, Direction dir, double rho_max,
                                std::size_t oversample, std::size_t n = 0) {
  if (!(rho_max > 0.0)) throw std::invalid_argument("ray_spectrum: rho_max must be > 0");
  if (oversample < 4) throw std::invalid_argument("ray_spectrum: oversample must be >= 4");
  if (n == 0) n = kProfileNodes;
  if (n % 2 != 0) ++n;
  const Slicer s = slicer(body, dir);
  const double w = s.width();
  const double h = w / static_cast<double>(n);
  std::vector<double> ts(n + 1);
  for (std::size_t j = 0; j <= n; ++j) ts[j] = s.A() + static_cast<double>(j) * h;
  ts.back() = s.B();
  const auto g = s.profile_sweep(ts);
  RaySpectrum sp;
  sp.direction = dir;
  sp.delta_rho = 1.0 / (static_cast<double>(oversample) * w);
  const auto q_max = static_cast<std::size_t>(std::ceil(rho_max / sp.delta_rho));
  if (q_max > oversample * n / 2) {
    throw std::invalid_argument("ray_spectrum: rho_max beyond sampling resolution");
  }
  const double a = s.A() + dot(body.center(), dir.unit());
  sp.ft = detail::filon_fft(g, a, h, oversample, q_max);
  for (std::size_t q = 0; q <= q_max; ++q) sp.rho.push_back(static_cast<double>(q) * sp.delta_rho);
  sp.ft[0] = body.area();
  return sp;
}

// ---------------------------------------------------------------------------
// Verifiers. Every "bounded by a constant" assertion uses kTestCeiling.

inline constexpr double kTestCeiling = 100.0;

struct PodkorytovReport {
  std::vector<double> s;
  std::vector<double> ratio;
  double max_ratio = 0.0;
  bool pass = false;
};

/// ratio(s) = |f̂(s)|·|s|/μ_f(1/|s|); passes when every ratio ≤ 1 + 1e−6.
inline PodkorytovReport check_podkorytov(const ProfileFunction& f, std::span<const double> s_grid) {
  PodkorytovReport rep;
  for (double s : s_grid) {
    if (!(std::abs(s) >= 2.0)) throw std::invalid_argument("check_podkorytov: need |s| >= 2");
    const double bound = detail::majorant(f, 1.0 / std::abs(s)) / std::abs(s);
    const double r = std::abs(ft_profile(f, s)) / bound;
    rep.s.push_back(s);
    rep.ratio.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-6;
  return rep;
}

struct BilateralReport {
  std::vector<double> h;
  std::vector<double> ratio;
  double ratio_min = kInf;
  double ratio_max = 0.0;
  bool pass = false;
};

/// ratio(h) = ‖Δ²_h f‖/(h^{1/2}μ_f(h)); passes when 0 < min and max/min ≤ ceiling.
inline BilateralReport check_bilateral(const ProfileFunction& f, std::span<const double> h_grid) {
  BilateralReport rep;
  for (double h : h_grid) {
    if (!(h > 0.0 && h <= 0.25)) throw std::invalid_argument("check_bilateral: need h in (0, 1/4]");
    const double r = second_diff_l2(f, h) / (std::sqrt(h) * mu(f, h));
    rep.h.push_back(h);
    rep.ratio.push_back(r);
    rep.ratio_min = std::min(rep.ratio_min, r);
    rep.ratio_max = std::max(rep.ratio_max, r);
  }
  rep.pass = rep.ratio_min > 0.0 && rep.ratio_max / rep.ratio_min <= kTestCeiling;
  return rep;
}

struct TailReport {
  std::vector<double> rho;
  std::vector<double> ratio_tail;   // {∫_{|s|≥ρ}|f̂|²}^{1/2} / ω₂(f, 1/ρ)
  std::vector<double> ratio_low;    // {∫_{|s|≤ρ}s⁴|f̂|²}^{1/2} / (ρ²ω₂(f, 1/ρ))
  std::vector<double> remainder;    // bound on the truncated part beyond 64ρ
  double max_ratio_tail = 0.0;
  double max_ratio_low = 0.0;
  bool pass = false;
};

/// Tail integrals truncated at 64ρ; the remainder beyond uses the majorant,
/// 2∫_{S}^{∞} s^{−2}μ_f(1/s)² ds = 2∫_0^{1/S} μ_f(u)² du.
inline TailReport check_tail(const ProfileFunction& f, std::span<const double> rho_grid) {
  TailReport rep;
  if (rho_grid.empty()) return rep;
  const double rho_top = *std::max_element(rho_grid.begin(), rho_grid.end());
  const RaySpectrum sp = profile_spectrum(f, 64.0 * rho_top, 8);
  for (double rho : rho_grid) {
    if (!(rho >= 2.0)) throw std::invalid_argument("check_tail: need rho >= 2");
    const double s_max = 64.0 * rho;
    const auto mesh = geometric_grid(1e-14, 1.0 / s_max, 64);
    double rem = 0.0;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
      rem += gauss20([&](double u) { return std::pow(detail::majorant(f, u), 2); }, mesh[i],
                     mesh[i + 1]);
    }
    rem = 2.0 * (rem + 1e-14 * std::pow(detail::majorant(f, 1e-14), 2));
    const double tail = 2.0 * sp.weighted_abs2(rho, s_max, 0) + rem;
    const double low = 2.0 * sp.weighted_abs2(0.0, rho, 4);
    const double w2 = omega2(f, 1.0 / rho);
    rep.rho.push_back(rho);
    rep.remainder.push_back(rem);
    rep.ratio_tail.push_back(std::sqrt(tail) / w2);
    rep.ratio_low.push_back(std::sqrt(low) / (rho * rho * w2));
    rep.max_ratio_tail = std::max(rep.max_ratio_tail, rep.ratio_tail.back());
    rep.max_ratio_low = std::max(rep.max_ratio_low, rep.ratio_low.back());
  }
  rep.pass = rep.max_ratio_tail <= kTestCeiling && rep.max_ratio_low <= kTestCeiling;
  return rep;
}

struct RayLowerReport {
  std::vector<double> rho;
  std::vector<double> q;
  double inf_q = kInf;
  double argmin_rho = 0.0;
  double last_octave_slope = 0.0;  // log₂ q(ρ_n) − log₂ q(ρ_{n−1}) per octave
  bool pass = false;
};

/// Largest decay per octave of q over the final grid step still read as flat.
inline constexpr double kRayLowerTrendFloor = -0.25;

/// q(ρ) = ρ^{1+σ}{∫_{1/2}^{1}|χ̂(τρΘ)|²dτ}^{1/2}; passes when inf q > 0 and q
/// does not decay over the last octave.
inline RayLowerReport check_ray_lower(const ConvexBody& body, Direction dir, double sigma,
                                      std::span<const double> rho_grid) {
  RayLowerReport rep;
  if (rho_grid.empty()) return rep;
  std::vector<double> grid(rho_grid.begin(), rho_grid.end());
  std::sort(grid.begin(), grid.end());
  const RaySpectrum sp = ray_spectrum(body, dir, grid.back(), 32);
  for (double rho : grid) {
    const double avg = sp.weighted_abs2(0.5 * rho, rho, 0) / rho;
    const double q = std::pow(rho, 1.0 + sigma) * std::sqrt(avg);
    rep.rho.push_back(rho);
    rep.q.push_back(q);
    if (q < rep.inf_q) {
      rep.inf_q = q;
      rep.argmin_rho = rho;
    }
  }
  if (grid.size() >= 2) {
    const std::size_t n = grid.size() - 1;
    rep.last_octave_slope =
        std::log2(rep.q[n] / rep.q[n - 1]) / std::log2(grid[n] / grid[n - 1]);
  }
  rep.pass = rep.inf_q > 0.0 && std::isfinite(rep.inf_q) &&
             rep.last_octave_slope >= kRayLowerTrendFloor;
  return rep;
}

}  // namespace disclab
