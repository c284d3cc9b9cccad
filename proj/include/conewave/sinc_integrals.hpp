#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <numbers>
#include <vector>

#include "conewave/error.hpp"
#include "conewave/quadrature.hpp"

namespace conewave {

/// sin(pi x) with the argument reduced exactly modulo 2; zero at integers.
inline double sinpi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fmod(x, 2.0);  // exact
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) return std::sin(std::numbers::pi * (1.0 - r));
  if (r < -0.5) return -std::sin(std::numbers::pi * (1.0 + r));
  return std::sin(std::numbers::pi * r);
}

inline double cospi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fmod(std::abs(x), 2.0);
  if (r > 1.0) r = 2.0 - r;  // cos(pi r) = cos(pi (2 - r))
  if (r == 0.5) return 0.0;
  if (r > 0.5) return -std::cos(std::numbers::pi * (1.0 - r));
  return std::cos(std::numbers::pi * r);
}

/// Normalized sinc: sin(pi x)/(pi x), the spectrum of the unit box.
inline double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double t = std::numbers::pi * x;
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return sinpi(x) / (std::numbers::pi * x);
}

inline double ipow(double x, int n) {
  double r = 1.0;
  double b = x;
  unsigned u = static_cast<unsigned>(n < 0 ? -n : n);
  while (u) {
    if (u & 1u) r *= b;
    b *= b;
    u >>= 1u;
  }
  return n < 0 ? 1.0 / r : r;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Integrals of the even function |t|^q sinc(t)^p (integers, p > q + 1).
///
/// The half line [0, X] is cut at knots every 1/8; panel integrals are
/// accumulated backwards so upper tails keep full relative precision. Beyond
/// X the tail comes from the cosine/sine expansion of sin^p and an
/// integration-by-parts series.
class SincMomentTable {
 public:
  static constexpr double kKnotStep = 0.125;
  static constexpr double kTableEnd = 256.0;

  SincMomentTable() = default;
  SincMomentTable(int q, int p) : q_(q), p_(p) {
    if (q < 0 || p < 1 || p <= q + 1) throw InvalidArgument("sinc moment table needs p > q + 1 >= 1");
    const std::size_t knots = static_cast<std::size_t>(kTableEnd / kKnotStep);
    upper_.assign(knots + 1, 0.0);
    upper_[knots] = asymptotic_tail(kTableEnd);
    const GaussRule& rule = gauss_legendre(10);
    for (std::size_t k = knots; k-- > 0;) {
      const double lo = kKnotStep * static_cast<double>(k);
      upper_[k] = upper_[k + 1] + gauss_integrate([this](double t) { return integrand(t); }, lo, lo + kKnotStep, rule);
    }
  }

  int q() const { return q_; }
  int p() const { return p_; }

  double integrand(double t) const { return ipow(std::abs(t), q_) * ipow(sinc(t), p_); }

  /// Integral over [0, inf).
  double total() const { return upper_[0]; }

  /// Integral over [x, inf) for x >= 0.
  double upper_half(double x) const {
    if (x >= kTableEnd) return asymptotic_tail(x);
    const std::size_t k = static_cast<std::size_t>(x / kKnotStep);
    const double knot = kKnotStep * static_cast<double>(k + 1);
    if (x == knot - kKnotStep) return upper_[k];
    return upper_[k + 1] +
           gauss_integrate([this](double t) { return integrand(t); }, x, knot, gauss_legendre(6));
  }

  /// Integral over [x, inf) of the integrand on the whole line.
  double upper(double x) const { return x >= 0.0 ? upper_half(x) : 2.0 * total() - upper_half(-x); }

  /// Integral over [lo, hi], evaluated from whichever side avoids cancellation.
  double segment(double lo, double hi) const {
    if (!(hi > lo)) return 0.0;
    if (lo >= 0.0) return upper_half(lo) - upper_half(hi);
    if (hi <= 0.0) return upper_half(-hi) - upper_half(-lo);
    return 2.0 * total() - upper_half(hi) - upper_half(-lo);
  }

  /// Mass outside [lo, hi] on the whole line.
  double outside(double lo, double hi) const { return upper(hi) + upper(-lo); }

 private:
  // pi^-p * int_x^inf t^(q-p) sin^p(pi t) dt for large x.
  double asymptotic_tail(double x) const {
    const int r = p_ - q_;
    const double scale = std::pow(std::numbers::pi, -p_);
    double sum = 0.0;
    if (p_ % 2 == 0) {
      const double c0 = binomial(p_, p_ / 2) * std::ldexp(1.0, -p_);
      sum += c0 * std::pow(x, 1.0 - r) / (r - 1.0);
    }
    const int top = p_ % 2 == 0 ? p_ / 2 - 1 : (p_ - 1) / 2;
    for (int k = 0; k <= top; ++k) {
      const int freq = p_ - 2 * k;
      const double coef = std::ldexp(1.0, 1 - p_) * binomial(p_, k) * (((top - k) % 2 == 0) ? 1.0 : -1.0) *
                          (p_ % 2 == 0 ? -1.0 : 1.0);
      // int_x^inf t^-r e^{i w t} dt = -e^{i w x} sum_j (r)_j x^{-r-j} / (i w)^{j+1}
      const double w = freq * std::numbers::pi;
      double re = 0.0, im = 0.0;
      double rising = 1.0;
      for (int j = 0; j < 8; ++j) {
        const double mag = rising * std::pow(x, -r - j) / std::pow(w, j + 1);
        // 1/(i)^{j+1}: j=0 -> -i, j=1 -> -1, j=2 -> i, j=3 -> 1
        switch (j % 4) {
          case 0: im -= mag; break;
          case 1: re -= mag; break;
          case 2: im += mag; break;
          default: re += mag; break;
        }
        rising *= (r + j);
      }
      const double c = cospi(freq * x), s = sinpi(freq * x);
      // -(c + i s)(re + i im)
      const double out_re = -(c * re - s * im);
      const double out_im = -(c * im + s * re);
      sum += coef * (p_ % 2 == 0 ? out_re : out_im);
    }
    return scale * sum;
  }

  int q_ = 0;
  int p_ = 2;
  std::vector<double> upper_;
};

/// Shared table per (q, p); built on first use.
inline const SincMomentTable& sinc_table(int q, int p) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<SincMomentTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{q, p}];
  if (!slot) slot = std::make_unique<SincMomentTable>(q, p);
  return *slot;
}

}  // namespace conewave
