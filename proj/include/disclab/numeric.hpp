#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace disclab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pairwise (cascade) summation; error grows like O(log n · eps).
template <class T>
T pairwise_sum(std::span<const T> v) {
  constexpr std::size_t kBlock = 32;
  if (v.size() <= kBlock) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

/// Fixed-order Gauss-Legendre rule on [a, b] with 20 nodes.
template <class F>
double gauss20(F&& f, double a, double b) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      s += w[i] * f(c);
    } else {
      s += w[i] * (f(c - r * x[i]) + f(c + r * x[i]));
    }
  }
  return s * r;
}

/// Composite Simpson rule over uniform samples (odd count >= 3); falls back
/// to the trapezoid rule on the final interval when the count is even.
inline double simpson_uniform(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (y[0] + y[1]);
  const std::size_t m = (n % 2 == 1) ? n : n - 1;
  double s = y[0] + y[m - 1];
  for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  s *= h / 3.0;
  if (m != n) s += 0.5 * h * (y[n - 2] + y[n - 1]);
  return s;
}

/// Geometric grid of `count` points from lo to hi inclusive.
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("geometric_grid: need count >= 2 and 0 < lo <= hi");
  }
  std::vector<double> g(count);
  const double r = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(r * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Smallest power of two that is >= n (n >= 1).
inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Panel boundaries on [a, b] graded toward both ends. A panel whose near
/// edge lies at distance d from the closer end has width
/// min(coarse, max(floor, growth·d)), further capped by `fine` while d < near.
/// floor = 1e-13·(b − a). Returned points are ascending, first a, last b.
inline std::vector<double> graded_mesh(double a, double b, double coarse, double growth,
                                       double fine = std::numeric_limits<double>::infinity(),
                                       double near = 0.0) {
  if (!(b > a)) return {a, b};
  const double half = 0.5 * (b - a);
  const double floor = 1e-13 * (b - a);
  std::vector<double> side{0.0};
  double d = 0.0;
  while (d < half) {
    double w = std::min(coarse, std::max(floor, growth * d));
    if (d < near) w = std::min(w, fine);
    d = std::min(half, d + w);
    // Merge a sliver left before the midpoint into the last panel.
    if (half - d < 0.25 * w) d = half;
    side.push_back(d);
  }
  std::vector<double> pts;
  pts.reserve(2 * side.size());
  for (double s : side) pts.push_back(a + s);
  pts.back() = a + half;
  for (std::size_t i = side.size() - 1; i-- > 0;) pts.push_back(b - side[i]);
  pts.front() = a;
  pts.back() = b;
  return pts;
}

/// Powers of two 2^e for e = e_lo..e_hi.
inline std::vector<double> dyadic_grid(int e_lo, int e_hi) {
  std::vector<double> g;
  for (int e = e_lo; e <= e_hi; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

/// Safeguarded Newton iteration for a root of f on [lo, hi] given the end
/// values flo = f(lo), fhi = f(hi) of opposite sign (or zero). `fd` returns
/// {f(x), f'(x)}. Falls back to bisection whenever a Newton step leaves the
/// bracket or fails to halve it.
template <class FD>
double bracketed_newton(FD&& fd, double lo, double hi, double flo, double fhi, double x0,
                        int max_iter = 200) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) return std::abs(flo) < std::abs(fhi) ? lo : hi;
  if (flo > 0.0) std::swap(lo, hi);  // invariant: f(lo) < 0 < f(hi)
  double x = std::clamp(x0, std::min(lo, hi), std::max(lo, hi));
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [fx, dfx] = fd(x);
  for (int it = 0; it < max_iter; ++it) {
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const bool newton_ok = dfx != 0.0 && ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) < 0.0 &&
                           std::abs(2.0 * fx) < std::abs(dx_old * dfx);
    dx_old = dx;
    double xn;
    if (newton_ok) {
      dx = fx / dfx;
      xn = x - dx;
    } else {
      dx = 0.5 * (hi - lo);
      xn = lo + dx;
    }
    if (xn == x || std::abs(dx) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(xn) ||
        std::abs(hi - lo) <= 2.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(std::abs(hi), std::abs(lo))) {
      return xn;
    }
    x = xn;
    std::tie(fx, dfx) = fd(x);
  }
  return x;
}

/// Bisection for the sign change of a monotone-sign function g on [lo, hi].
template <class G>
double bisect_sign(G&& g, double lo, double hi, int iterations = 100) {
  const bool neg_lo = g(lo) < 0.0;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((g(mid) < 0.0) == neg_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Worker count: hardware concurrency capped by DISCLAB_THREADS when set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DISCLAB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

namespace detail {
inline thread_local bool in_worker = false;
}

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
/// processed exactly once; callers write results into per-index slots so the
/// outcome does not depend on the thread count. Calls made from inside a
/// worker run serially on that worker.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1 || detail::in_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_worker = true;
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace disclab
