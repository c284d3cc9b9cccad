#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace conewave {

struct RayFit {
  double d1 = 1.0;  // ray direction (not normalized)
  double d2 = 0.0;
  bool included = true;  // false when the ray lies outside the region where decay is claimed
  std::vector<double> radii;
  std::vector<double> values;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double reference_slope = std::numeric_limits<double>::quiet_NaN();  // for relative tests
  std::size_t used = 0;
  bool pass = false;
  std::string note;
};

/// Outcome of a log-log decay test along rays.
struct DecayReport {
  std::string subject;
  int N = 0;
  double threshold = 0.0;  // pass iff slope <= threshold
  std::vector<RayFit> rays;
  bool passed = false;
  bool inconclusive = false;
  bool vacuous = false;
};

struct LineFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
};

/// Least-squares fit of log(value) against log(x), skipping non-positive or
/// non-finite values.
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0) || !std::isfinite(y[k])) continue;
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  LineFit fit;
  fit.used = n;
  if (n < 2) return fit;
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

inline std::vector<double> dyadic_radii(int lo_exp, int hi_exp) {
  std::vector<double> r;
  for (int e = lo_exp; e <= hi_exp; ++e) r.push_back(std::ldexp(1.0, e));
  return r;
}

/// Fits f along each ray at the given radii. `region(d1, d2)` decides whether
/// decay is required on that ray.
template <class F, class Region>
DecayReport fit_rays(const std::string& subject, int N, const std::vector<std::pair<double, double>>& directions,
                     const std::vector<double>& radii, F&& f, Region&& region) {
  DecayReport report;
  report.subject = subject;
  report.N = N;
  report.threshold = -N + 0.25;
  bool any = false, all_ok = true;
  for (auto [d1, d2] : directions) {
    RayFit ray;
    ray.d1 = d1;
    ray.d2 = d2;
    ray.included = region(d1, d2);
    const double norm = std::hypot(d1, d2);
    for (double r : radii) {
      ray.radii.push_back(r);
      ray.values.push_back(f(r * d1 / norm, r * d2 / norm));
    }
    LineFit fit = fit_loglog(ray.radii, ray.values);
    ray.slope = fit.slope;
    ray.used = fit.used;
    if (!ray.included) {
      ray.note = "excluded: no decay claimed on this ray";
      ray.pass = true;
    } else if (fit.used < 4) {
      ray.note = "inconclusive: fewer than 4 usable radii";
      report.inconclusive = true;
    } else {
      any = true;
      ray.pass = ray.slope <= report.threshold;
      all_ok = all_ok && ray.pass;
    }
    report.rays.push_back(ray);
  }
  report.passed = any && all_ok && !report.inconclusive;
  return report;
}

}  // namespace conewave
