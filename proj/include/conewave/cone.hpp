#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "conewave/decay.hpp"
#include "conewave/error.hpp"
#include "conewave/grid.hpp"
#include "conewave/parallel.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sinc_integrals.hpp"

namespace conewave {

/// Phi^(xi) = sigma^2 c_k (sinc(sigma xi1) sinc(sigma xi2))^(2k): the spectrum
/// of a tensor B-spline of order 2k dilated by sigma, normalized so that
/// Phi(0) = integral of Phi^ = 1.
struct BumpDescriptor {
  int k = 3;
  double sigma = 0.5;
  double line_integral = 1.0;  // I_2k = integral of sinc^2k over the line
  double c_k = 1.0;            // 1 / I_2k^2

  double peak() const { return sigma * sigma * c_k; }
  double support_radius() const { return k * sigma * std::numbers::sqrt2; }

  /// One-dimensional factor g with integral 1; Phi^ = g(xi1) g(xi2).
  double factor(double x) const { return sigma * ipow(sinc(sigma * x), 2 * k) / line_integral; }
  double spectrum(double xi1, double xi2) const { return factor(xi1) * factor(xi2); }

  /// Mass of Phi^ outside the square [-R, R]^2.
  double mass_outside_square(double R) const {
    const SincMomentTable& t = sinc_table(0, 2 * k);
    const double out1 = t.upper_half(sigma * R) / t.total();
    return out1 * (2.0 - out1);
  }
};

inline int default_bump_order(int N) { return N / 2 + 3; }

inline BumpDescriptor make_bump(int k, int N_required) {
  if (k < 1) throw InvalidArgument("bump order must be positive");
  if (2 * k < N_required)
    throw ConstraintViolation("insufficient smoothness: bump decay order 2k=" + std::to_string(2 * k) +
                              " is below N=" + std::to_string(N_required));
  BumpDescriptor b;
  b.k = k;
  b.line_integral = 2.0 * sinc_table(0, 2 * k).total();
  b.c_k = 1.0 / (b.line_integral * b.line_integral);
  // Largest dyadic sigma with sigma^2 c_k <= 1, i.e. sigma <= I_2k.
  b.sigma = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(b.line_integral))));
  while (b.peak() > 1.0) b.sigma *= 0.5;
  while (2.0 * b.sigma * 2.0 * b.sigma * b.c_k <= 1.0) b.sigma *= 2.0;
  return b;
}

/// Pointwise p0^ = Phi^ * chi_C with C = {|xi2| <= |xi1|}, and p1^ = 1 - p0^.
///
/// For xi off the horizontal cone (|xi2| >= |xi1|) p0^ is small and is
/// integrated directly:
///   p0^(xi) = int g(e1) mass_g([xi2 - |xi1 - e1|, xi2 + |xi1 - e1|]) de1.
/// On the cone, p1^(xi) = p0^(xi2, xi1) by the exchange symmetry of Phi^, so
/// the same direct integral serves. The larger one is 1 minus the smaller.
class ConeProjector {
 public:
  explicit ConeProjector(const BumpDescriptor& bump, std::size_t panel_order = 16)
      : bump_(bump), table_(&sinc_table(0, 2 * bump.k)), order_(panel_order) {}

  const BumpDescriptor& bump() const { return bump_; }

  /// {p0^, p1^} at xi.
  std::pair<double, double> evaluate(double xi1, double xi2) const {
    const double x = std::abs(xi1), y = std::abs(xi2);
    if (y >= x) {
      const double d = off_cone(x, y);
      return {d, 1.0 - d};
    }
    const double d = off_cone(y, x);
    return {1.0 - d, d};
  }

  double p0(double xi1, double xi2) const { return evaluate(xi1, xi2).first; }
  double p1(double xi1, double xi2) const { return evaluate(xi1, xi2).second; }

 private:
  // mass of g over [lo, hi]
  double mass(double lo, double hi) const {
    return table_->segment(bump_.sigma * lo, bump_.sigma * hi) / (2.0 * table_->total());
  }

  // Direct integral for x = |xi1| <= y = |xi2|.
  double off_cone(double x, double y) const {
    const double step = 1.0 / bump_.sigma;
    const double W = x + y + 48.0 * step;
    std::vector<double> breaks;
    const double start = -std::ceil(W / step) * step;
    for (double b = start; b <= W + 0.5 * step; b += step) breaks.push_back(b);
    breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const GaussRule& rule = gauss_legendre(order_);
    auto integrand = [&](double e1) {
      const double d = std::abs(x - e1);
      return bump_.factor(e1) * mass(y - d, y + d);
    };
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) sum += gauss_integrate(integrand, breaks[k], breaks[k + 1], rule);
    // Beyond the panels the window covers essentially all of g.
    const double lo = breaks.front(), hi = breaks.back();
    const double tail = (table_->upper_half(bump_.sigma * -lo) + table_->upper_half(bump_.sigma * hi)) /
                        (2.0 * table_->total());
    return sum + tail;
  }

  BumpDescriptor bump_;
  const SincMomentTable* table_;
  std::size_t order_;
};

inline std::string format_tolerance(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

struct ConeProjectionSet {
  FrequencyGrid grid;
  BumpDescriptor bump;
  SpectralMap p0, p1, q0, q1;
};

namespace detail {

// Evaluates f(|xi1|, |xi2|) once per distinct (|i - c1|, |j - c2|) pair.
template <class F>
void fill_by_quadrant(const FrequencyGrid& grid, F&& f, SpectralMap& out0, SpectralMap* out1 = nullptr) {
  const std::size_t c1 = grid.center1(), c2 = grid.center2();
  const std::size_t r1 = std::max(c1, grid.n1() - 1 - c1), r2 = std::max(c2, grid.n2() - 1 - c2);
  std::vector<std::pair<double, double>> values((r1 + 1) * (r2 + 1));
  parallel_for(r1 + 1, [&](std::size_t a) {
    const double x = static_cast<double>(a) * grid.spacing1();
    for (std::size_t b = 0; b <= r2; ++b) values[a * (r2 + 1) + b] = f(x, static_cast<double>(b) * grid.spacing2());
  });
  for (std::size_t i = 0; i < grid.n1(); ++i) {
    const std::size_t a = i >= c1 ? i - c1 : c1 - i;
    for (std::size_t j = 0; j < grid.n2(); ++j) {
      const std::size_t b = j >= c2 ? j - c2 : c2 - j;
      const auto& v = values[a * (r2 + 1) + b];
      out0(i, j) = v.first;
      if (out1) (*out1)(i, j) = v.second;
    }
  }
}

}  // namespace detail

/// Samples p0^, p1^ and their square roots. Values are exact per sample; the
/// tail check guards uses that filter spectra reaching the grid edge. Callers
/// that only filter band-limited data may pass a larger tolerance.
inline ConeProjectionSet compute_cone_projection(const BumpDescriptor& bump, const FrequencyGrid& grid,
                                                 double tail_tolerance = 1e-8) {
  const double tail = bump.mass_outside_square(grid.extent());
  if (!(tail < tail_tolerance))
    throw PreconditionError("grid too small: bump mass outside [-extent, extent]^2 is " + std::to_string(tail) +
                            " (needs < " + format_tolerance(tail_tolerance) + ")");
  ConeProjector proj(bump);
  ConeProjectionSet set{grid, bump, SpectralMap(grid), SpectralMap(grid), SpectralMap(grid), SpectralMap(grid)};
  detail::fill_by_quadrant(grid, [&](double x, double y) { return proj.evaluate(x, y); }, set.p0, &set.p1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    set.q0.values[k] = std::sqrt(set.p0.values[k]);
    set.q1.values[k] = std::sqrt(set.p1.values[k]);
  }
  return set;
}

inline std::vector<std::pair<double, double>> default_decay_rays() {
  return {{1, 0}, {2, 1}, {1, 1}, {1, 1.4}, {2, 3}, {1, 2}, {1, 4}, {0, 1}};
}

/// Decay of p0^ off the horizontal cone and of p1^ off the
/// vertical one, along rays at radii 2^lo .. 2^hi.
inline DecayReport verify_projection_decay(const ConeProjector& proj, int N, int which = 0, int lo_exp = 4,
                                           int hi_exp = 10,
                                           std::vector<std::pair<double, double>> rays = default_decay_rays()) {
  const auto radii = dyadic_radii(lo_exp, hi_exp);
  if (which == 0)
    return fit_rays("p0", N, rays, radii, [&](double x, double y) { return proj.p0(x, y); },
                    [](double d1, double d2) { return std::abs(d2) >= 1.5 * std::abs(d1); });
  for (auto& r : rays) std::swap(r.first, r.second);
  return fit_rays("p1", N, rays, radii, [&](double x, double y) { return proj.p1(x, y); },
                  [](double d1, double d2) { return std::abs(d1) >= 1.5 * std::abs(d2); });
}

inline DecayReport verify_projection_decay(const ConeProjectionSet& set, int N, int which = 0) {
  return verify_projection_decay(ConeProjector(set.bump), N, which);
}

}  // namespace conewave
