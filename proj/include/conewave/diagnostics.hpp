#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "conewave/admissibility.hpp"
#include "conewave/decay.hpp"
#include "conewave/error.hpp"
#include "conewave/generator.hpp"
#include "conewave/parallel.hpp"
#include "conewave/sinc_integrals.hpp"
#include "conewave/transform.hpp"
#include "conewave/window.hpp"

namespace conewave {

/// sup |psi^(w) / w1|^2: the generator read as psi^ = w1 theta^ with theta
/// carrying the remaining M - 1 moments.
inline double reduced_theta_sup_sq(const ShearletGenerator& gen) {
  const ShearletGenerator h = horizontal_of(gen);
  auto f = [&](double u, double v) {
    if (u == 0.0) return gen.M == 1 ? h.amplitude * h.amplitude * std::pow(2.0 * std::numbers::pi, 2) : 0.0;
    return h.horizontal_spectrum_sq(u, v) / (u * u);
  };
  // |sinc(v)| peaks at v = 0; the u profile is searched.
  const double s = locate_supremum([&](double u, double v) { return f(u, v); }, 2.0, 401);
  return std::max(s, f(0.0, 0.0));
}

/// Half of the full-plane admissibility integral: the C_psi of the shearlet
/// mu with psi^ = w1^(M-1) mu^.
inline double reduced_constant(const ShearletGenerator& gen) {
  const ShearletGenerator h = horizontal_of(gen);
  const double K = h.amplitude * h.amplitude * std::pow(2.0 * std::numbers::pi, 2 * h.M);
  return K * sinc_table(0, 2 * h.m1).total() * 2.0 * sinc_table(0, 2 * h.m2).total();
}

struct StripProbe {
  double delta = 0.0;
  double R = 0.0;
  double measured_sup = 0.0;   // sup of Delta over |xi1| <= delta, |xi| <= R
  double theta_sup_sq = 0.0;   // sup |psi^ / w1|^2
  double bound = 0.0;          // 8 theta_sup_sq delta^2
  double reduced_bound = 0.0;  // C_mu delta^(2(M-1))
  bool holds = false;          // measured_sup <= bound, no tolerance
};

namespace detail {

// Dense sampling of f over [0, d] x [0, R] (both signs are equivalent by
// symmetry) followed by pattern refinement clipped to the box.
template <class F>
double strip_supremum(F&& f, double d, double R) {
  const std::size_t n1 = 33, n2 = 1025;
  std::vector<double> ys;
  // uniform near the origin, geometric further out
  for (std::size_t k = 0; k < n2 / 2; ++k) ys.push_back(std::min(R, 4.0) * k / (n2 / 2 - 1.0));
  for (std::size_t k = 1; k <= n2 / 2; ++k) {
    const double y = 4.0 * std::pow(R / 4.0, static_cast<double>(k) / (n2 / 2));
    if (y > 4.0 && y <= R) ys.push_back(y);
  }
  std::vector<double> best_row(n1, -1.0), best_y(n1, 0.0);
  parallel_for(n1, [&](std::size_t i) {
    const double x = d * i / (n1 - 1.0);
    for (double y : ys) {
      const double v = f(x, y);
      if (v > best_row[i]) best_row[i] = v, best_y[i] = y;
    }
  });
  std::size_t bi = 0;
  for (std::size_t i = 1; i < n1; ++i)
    if (best_row[i] > best_row[bi]) bi = i;
  double bx = d * bi / (n1 - 1.0), by = best_y[bi], best = best_row[bi];
  double h1 = d / (n1 - 1.0), h2 = std::max(1e-3, by * 0.05);
  for (int it = 0; it < 80 && (h1 > 1e-12 || h2 > 1e-12); ++it) {
    bool moved = false;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        const double x = std::clamp(bx + a * h1, 0.0, d), y = std::clamp(by + b * h2, 0.0, R);
        const double v = f(x, y);
        if (v > best) best = v, bx = x, by = y, moved = true;
      }
    if (!moved) h1 *= 0.5, h2 *= 0.5;
  }
  return best;
}

}  // namespace detail

inline StripProbe strip_bound_probe(const ShearletGenerator& gen, double delta, double R = 256.0) {
  if (!(delta > 0.0)) throw InvalidArgument("strip half-width must be positive");
  StripProbe p;
  p.delta = delta;
  p.R = R;
  const CalderonEvaluator eval(gen);
  p.measured_sup = detail::strip_supremum([&](double x, double y) { return eval.delta(x, y); }, delta, R);
  p.theta_sup_sq = reduced_theta_sup_sq(gen);
  p.bound = 8.0 * p.theta_sup_sq * delta * delta;
  p.reduced_bound = reduced_constant(gen) * std::pow(delta, 2.0 * (gen.M - 1));
  p.holds = p.measured_sup <= p.bound;
  return p;
}

/// Largest dyadic delta with 8 sup|theta^|^2 delta^2 < C_psi / 2.
inline double strip_width_for(const ShearletGenerator& gen, double cpsi) {
  const double s = reduced_theta_sup_sq(gen);
  double d = 1.0;
  while (8.0 * s * d * d >= 0.5 * cpsi) d *= 0.5;
  return d;
}

struct NonexistenceReport {
  double cpsi = 0.0;
  std::vector<double> radii;     // 2^6 .. 2^12
  std::vector<double> diagonal;  // (Delta + Delta_nu) along the slope-1 ray
  double diagonal_limit = 0.0;   // value at the largest radius
  bool diagonal_monotone = true;
  double delta_star = 0.0;
  double strip_bound = 0.0;
  double strip_sup = 0.0;  // sup of Delta + Delta_nu over the strip
  double gap = 0.0;        // diagonal_limit - strip_sup
  bool contradiction = false;
};

inline NonexistenceReport nonexistence_report(const ShearletGenerator& gen, double R = 4096.0) {
  NonexistenceReport rep;
  const CalderonEvaluator eval(gen);
  rep.cpsi = eval.cpsi();
  for (int e = 6; e <= 12; ++e) {
    const double r = std::ldexp(1.0, e), c = r / std::numbers::sqrt2;
    rep.radii.push_back(r);
    rep.diagonal.push_back(eval.delta(c, c) + eval.delta_nu(c, c));
  }
  for (std::size_t k = 1; k < rep.diagonal.size(); ++k)
    if (rep.diagonal[k] < rep.diagonal[k - 1] - 1e-10 * rep.cpsi) rep.diagonal_monotone = false;
  rep.diagonal_limit = rep.diagonal.back();
  rep.delta_star = strip_width_for(gen, rep.cpsi);
  rep.strip_bound = 8.0 * reduced_theta_sup_sq(gen) * rep.delta_star * rep.delta_star;
  rep.strip_sup = detail::strip_supremum(
      [&](double x, double y) { return eval.delta(x, y) + eval.delta_nu(x, y); }, rep.delta_star, R);
  rep.gap = rep.diagonal_limit - rep.strip_sup;
  rep.contradiction = rep.gap > 0.0;
  return rep;
}

struct SlopeEstimate {
  bool defined = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> band_scales;  // geometric band centres
  std::vector<double> band_maxima;
  std::string note;
};

/// Least-squares slope of log max|c| against log a, one point per dyadic
/// band, maxima over the nodes of the band at shear s and over lattice
/// points within `window` samples of t. Only nodes with a in [a_min, a_max]
/// enter the fit.
inline SlopeEstimate decay_slope_estimate(const CoefficientField& c, std::size_t ti, std::size_t tj, double s,
                                          std::size_t window = 2, double a_min = 0.0,
                                          double a_max = std::numeric_limits<double>::infinity()) {
  SlopeEstimate est;
  const FrequencyGrid& g = c.grid;
  std::vector<std::pair<double, double>> by_band;  // (band centre, max)
  std::vector<int> bands;
  for (const CoefficientNode& node : c.nodes) {
    if (std::abs(node.s - s) > 1e-12) continue;
    if (node.a < a_min || node.a > a_max) continue;
    const double b = std::floor(-std::log2(node.a));  // a in [2^-(b+1), 2^-b]
    const double centre = std::ldexp(std::numbers::sqrt2 / 2.0, -static_cast<int>(b));
    double m = 0.0;
    for (long di = -static_cast<long>(window); di <= static_cast<long>(window); ++di)
      for (long dj = -static_cast<long>(window); dj <= static_cast<long>(window); ++dj) {
        const std::size_t i = (ti + g.n1() + di) % g.n1(), j = (tj + g.n2() + dj) % g.n2();
        m = std::max(m, std::abs(node.values(i, j)));
      }
    auto it = std::find_if(by_band.begin(), by_band.end(), [&](const auto& e) { return e.first == centre; });
    if (it == by_band.end())
      by_band.emplace_back(centre, m);
    else
      it->second = std::max(it->second, m);
  }
  std::sort(by_band.begin(), by_band.end());
  for (const auto& [a, m] : by_band) {
    est.band_scales.push_back(a);
    est.band_maxima.push_back(m);
  }
  const LineFit fit = fit_loglog(est.band_scales, est.band_maxima);
  if (fit.used < 2 || !std::isfinite(fit.slope)) {
    est.note = "undefined: fewer than two bands with nonzero coefficients";
    return est;
  }
  est.defined = true;
  est.slope = fit.slope;
  return est;
}

/// Shears -2, -1.5, ..., 2 plus s0 when it is not on that grid.
inline std::vector<double> diagnostic_shears(double s0) {
  std::vector<double> out;
  for (int k = -4; k <= 4; ++k) out.push_back(0.5 * k);
  if (std::none_of(out.begin(), out.end(), [&](double s) { return std::abs(s - s0) < 1e-12; })) out.push_back(s0);
  std::sort(out.begin(), out.end());
  return out;
}

struct DirectionalReport {
  double s0 = 0.0;
  double a_min = 0.0, a_max = 0.0;
  std::vector<double> shears, slopes;
  double on_slope = std::numeric_limits<double>::quiet_NaN();
  double off_slope = std::numeric_limits<double>::quiet_NaN();  // smallest slope with |s - s0| >= 1
  double gap = std::numeric_limits<double>::quiet_NaN();        // off_slope - on_slope
};

/// Decay slopes at every shear of c, fitted over a in [1/extent, 1/2]: finer
/// nodes peak near the edge of the sampled band once |s| reaches 2.
inline DirectionalReport directional_report(const CoefficientField& c, std::size_t ti, std::size_t tj, double s0,
                                            std::size_t window = 2) {
  DirectionalReport rep;
  rep.s0 = s0;
  rep.a_min = 1.0 / c.grid.extent();
  rep.a_max = 0.5;
  for (const CoefficientNode& n : c.nodes)
    if (std::none_of(rep.shears.begin(), rep.shears.end(), [&](double s) { return s == n.s; })) rep.shears.push_back(n.s);
  std::sort(rep.shears.begin(), rep.shears.end());
  std::vector<double> off;
  for (double s : rep.shears) {
    const SlopeEstimate e = decay_slope_estimate(c, ti, tj, s, window, rep.a_min, rep.a_max);
    rep.slopes.push_back(e.slope);
    if (std::abs(s - s0) < 1e-12) rep.on_slope = e.slope;
    if (std::abs(s - s0) >= 1.0 - 1e-12) off.push_back(e.slope);
  }
  // an undefined slope anywhere leaves the gap undefined
  if (!off.empty()) rep.off_slope = *std::min_element(off.begin(), off.end());
  for (double v : off)
    if (std::isnan(v)) rep.off_slope = v;
  rep.gap = rep.off_slope - rep.on_slope;
  return rep;
}

}  // namespace conewave
