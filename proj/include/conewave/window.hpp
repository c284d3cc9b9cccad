#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "conewave/admissibility.hpp"
#include "conewave/cone.hpp"
#include "conewave/decay.hpp"
#include "conewave/error.hpp"
#include "conewave/fft.hpp"
#include "conewave/generator.hpp"
#include "conewave/grid.hpp"
#include "conewave/parallel.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sinc_integrals.hpp"

namespace conewave {

/// Semi-analytic partial Calderon function of the horizontal generator.
///
/// With w = a|xi1| and y = sqrt(a)(xi2 - s xi1) the defining double integral
/// becomes
///   Delta(xi) = K int_0^|xi1| w^(2M-2) sinc^(2 m1)(w) J(w) dw,
///   J(w) = integral of sinc^(2 m2) over [lo(w), hi(w)],
///   hi, lo = sqrt(w/|xi1|) (xi2 +- 2|xi1|),  K = amp^2 (2 pi)^(2M).
/// The window C_psi - Delta is evaluated as the complementary integral
///   K [I2 int_|xi1|^inf w^(2M-2) sinc^(2 m1) dw
///      + int_0^|xi1| w^(2M-2) sinc^(2 m1)(w) (mass outside [lo, hi]) dw],
/// which keeps full relative precision where the window is small.
class CalderonEvaluator {
 public:
  explicit CalderonEvaluator(const ShearletGenerator& gen, std::size_t panel_order = 16)
      : gen_(horizontal_of(gen)),
        t1_(&sinc_table(2 * gen.M - 2, 2 * gen.m1)),
        t2_(&sinc_table(0, 2 * gen.m2)),
        order_(panel_order) {
    k_ = gen.amplitude * gen.amplitude * std::pow(2.0 * std::numbers::pi, 2 * gen.M);
    i2_ = 2.0 * t2_->total();
    cpsi_ = k_ * t1_->total() * i2_;
  }

  const ShearletGenerator& generator() const { return gen_; }
  double cpsi() const { return cpsi_; }

  /// {Delta, C_psi - Delta} at xi, each computed on the side that is small.
  std::pair<double, double> evaluate(double xi1, double xi2) const {
    const double x = std::abs(xi1), y = std::abs(xi2);
    if (x == 0.0) return {0.0, cpsi_};
    if (x <= 0.25) {
      const double d = direct_delta(x, y);
      return {d, cpsi_ - d};
    }
    const double w = direct_window(x, y);
    return {cpsi_ - w, w};
  }

  double delta(double xi1, double xi2) const { return evaluate(xi1, xi2).first; }
  double window(double xi1, double xi2) const { return evaluate(xi1, xi2).second; }
  /// Transposed system: Delta_nu(xi1, xi2) = Delta(xi2, xi1).
  double delta_nu(double xi1, double xi2) const { return evaluate(xi2, xi1).first; }
  double window_nu(double xi1, double xi2) const { return evaluate(xi2, xi1).second; }

 private:
  static constexpr double kOmegaCap = 40.0;

  double weight(double w) const { return ipow(w, 2 * gen_.M - 2) * ipow(sinc(w), 2 * gen_.m1); }

  std::vector<double> omega_breaks(double x, double top) const {
    std::vector<double> b;
    const int levels = 24 + static_cast<int>(std::ceil(std::log2(std::max(1.0, x))));
    const double first = std::min(1.0, top);
    for (int k = levels; k >= 1; --k) b.push_back(first * std::ldexp(1.0, -k));
    b.push_back(first);
    for (double w = 2.0; w < top; w += 1.0) b.push_back(w);
    if (top > first) b.push_back(top);
    return b;
  }

  template <class F>
  double panels(const std::vector<double>& b, F&& f) const {
    const GaussRule& rule = gauss_legendre(order_);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) sum += gauss_integrate(f, b[k], b[k + 1], rule);
    return sum;
  }

  double direct_window(double x, double y) const {
    const double top = std::min(x, kOmegaCap);
    const double inv = 1.0 / x;
    double inner = panels(omega_breaks(x, top), [&](double w) {
      const double r = std::sqrt(w * inv);
      return weight(w) * t2_->outside(r * (y - 2.0 * x), r * (y + 2.0 * x));
    });
    return k_ * (i2_ * t1_->upper_half(x) + inner);
  }

  double direct_delta(double x, double y) const {
    const double inv = 1.0 / x;
    double sum = panels(omega_breaks(x, x), [&](double w) {
      const double r = std::sqrt(w * inv);
      return weight(w) * t2_->segment(r * (y - 2.0 * x), r * (y + 2.0 * x));
    });
    return k_ * sum;
  }

  ShearletGenerator gen_;
  const SincMomentTable* t1_;
  const SincMomentTable* t2_;
  std::size_t order_;
  double k_ = 0.0, i2_ = 0.0, cpsi_ = 0.0;
};

/// Scheme quadrature of the Calderon sum of `gen` (either orientation):
/// sum_n w_n |psi^(a_n xi1, sqrt(a_n)(xi2 - s_n xi1))|^2 with a^-3/2 weights.
inline SpectralMap compute_delta(const ShearletGenerator& gen, const FrequencyGrid& grid,
                                 const ScaleShearScheme& scheme) {
  if (scheme.measure != MeasureTag::MinusThreeHalves)
    throw ContractViolation("compute_delta needs a scheme with the a^-3/2 measure tag");
  SpectralMap out(grid);
  const std::size_t ns = scheme.shears.size(), na = scheme.scales.size();
  parallel_for(grid.n1(), [&](std::size_t i) {
    const double x1 = grid.xi1(i);
    for (std::size_t j = 0; j < grid.n2(); ++j) {
      const double x2 = grid.xi2(j);
      double sum = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        double row = 0.0;
        for (std::size_t k = 0; k < ns; ++k)
          row += scheme.shear_weights[k] * gen.sheared_sq(scheme.scales[a], scheme.shears[k], x1, x2);
        sum += scheme.scale_weights[a] * row;
      }
      out(i, j) = sum;
    }
  });
  // Moment line is exactly zero.
  if (gen.orientation == Orientation::Horizontal) {
    for (std::size_t j = 0; j < grid.n2(); ++j) out(grid.center1(), j) = 0.0;
  } else {
    for (std::size_t i = 0; i < grid.n1(); ++i) out(i, grid.center2()) = 0.0;
  }
  return out;
}

/// Semi-analytic Delta and window sampled on a grid (horizontal generator).
inline std::pair<SpectralMap, SpectralMap> compute_delta_and_window(const CalderonEvaluator& eval,
                                                                    const FrequencyGrid& grid) {
  SpectralMap delta(grid), window(grid);
  detail::fill_by_quadrant(grid, [&](double x, double y) { return eval.evaluate(x, y); }, delta, &window);
  return {std::move(delta), std::move(window)};
}

inline SpectralMap transpose_map(const SpectralMap& m) {
  const FrequencyGrid& g = m.grid;
  if (g.n1() != g.n2()) throw ContractViolation("transposing a Calderon map needs a square grid");
  SpectralMap out(g);
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j) out(i, j) = m(j, i);
  return out;
}

struct FrameSpectrum {
  FrequencyGrid grid;
  double cpsi = 0.0;  // frame constant shared by Delta and the windows
  SpectralMap delta, delta_nu;
  SpectralMap win0, win1;  // |phi0^|^2 and |phi1^|^2
  SpectralMap phi;         // (p0 |phi0|^2 + p1 |phi1|^2)^(1/2)
  std::size_t clamped = 0;
};

/// |phi_i^|^2 = max(C - Delta, 0), phi^ = (p0 |phi0^|^2 + p1 |phi1^|^2)^(1/2).
inline FrameSpectrum build_windows(double cpsi, const SpectralMap& delta, const SpectralMap& delta_nu,
                                   const ConeProjectionSet& cones) {
  require_same_grid(delta.grid, delta_nu.grid, "Delta and Delta_nu");
  require_same_grid(delta.grid, cones.grid, "Delta and cone projections");
  const FrequencyGrid& g = delta.grid;
  FrameSpectrum fs{g, cpsi, delta, delta_nu, SpectralMap(g), SpectralMap(g), SpectralMap(g), 0};
  for (std::size_t k = 0; k < g.size(); ++k) {
    double w0 = cpsi - delta.values[k], w1 = cpsi - delta_nu.values[k];
    if (w0 < 0.0) w0 = 0.0, ++fs.clamped;
    if (w1 < 0.0) w1 = 0.0, ++fs.clamped;
    fs.win0.values[k] = w0;
    fs.win1.values[k] = w1;
    fs.phi.values[k] = std::sqrt(cones.p0.values[k] * w0 + cones.p1.values[k] * w1);
  }
  if (static_cast<double>(fs.clamped) > 1e-3 * 2.0 * static_cast<double>(g.size()))
    throw InconsistencyError("window radicand clamped on " + std::to_string(fs.clamped) +
                             " samples: C_psi and Delta quadratures disagree");
  return fs;
}

/// Frame spectrum from the semi-analytic Calderon evaluator. The windows are
/// the directly integrated complements; Delta is C_psi minus the window.
inline FrameSpectrum build_frame_spectrum(const ShearletGenerator& gen, const ConeProjectionSet& cones) {
  CalderonEvaluator eval(gen);
  auto [delta, window] = compute_delta_and_window(eval, cones.grid);
  SpectralMap delta_nu = transpose_map(delta);
  FrameSpectrum fs = build_windows(eval.cpsi(), delta, delta_nu, cones);
  fs.win0 = window;
  fs.win1 = transpose_map(window);
  for (std::size_t k = 0; k < fs.grid.size(); ++k)
    fs.phi.values[k] = std::sqrt(cones.p0.values[k] * fs.win0.values[k] + cones.p1.values[k] * fs.win1.values[k]);
  return fs;
}

/// Largest |p0 (Delta + W0) + p1 (Delta_nu + W1) - C| / C over the grid.
inline double tight_frame_identity_error(const FrameSpectrum& fs, const ConeProjectionSet& cones, double C) {
  double worst = 0.0;
  for (std::size_t k = 0; k < fs.grid.size(); ++k) {
    const double lhs = cones.p0.values[k] * (fs.delta.values[k] + fs.win0.values[k]) +
                       cones.p1.values[k] * (fs.delta_nu.values[k] + fs.win1.values[k]);
    worst = std::max(worst, std::abs(lhs - C) / C);
  }
  return worst;
}

/// Decay of |phi0^|^2 inside the cone of slope 3/2 and of |phi1^|^2 on the
/// transposed region.
inline DecayReport verify_window_decay(const CalderonEvaluator& eval, int N, int which = 0, int lo_exp = 4,
                                       int hi_exp = 10,
                                       std::vector<std::pair<double, double>> rays = default_decay_rays()) {
  const auto radii = dyadic_radii(lo_exp, hi_exp);
  if (which == 0)
    return fit_rays("window0", N, rays, radii, [&](double x, double y) { return eval.window(x, y); },
                    [](double d1, double d2) { return std::abs(d2) <= 1.5 * std::abs(d1); });
  for (auto& r : rays) std::swap(r.first, r.second);
  return fit_rays("window1", N, rays, radii, [&](double x, double y) { return eval.window_nu(x, y); },
                  [](double d1, double d2) { return std::abs(d1) <= 1.5 * std::abs(d2); });
}

/// Operator norm bound of the shear-dilation matrix at shear s.
inline double shear_norm_bound(double s) {
  return std::sqrt(1.0 + s * s / 2.0 + std::sqrt(s * s + s * s * s * s / 4.0));
}

struct SupportReport {
  double A = 0.0;
  double r1 = 0.0;  // 2 sqrt(3 + sqrt 5) A
  double r2 = 0.0;  // 2 C(2) A = 2 (1 + sqrt 2) A
  double test_radius = 0.0;
  double fraction_outside_test = 0.0;         // inverse transform of Delta
  double window_fraction_outside_test = 0.0;  // inverse transform of C_psi - Delta
  double radius_1e6 = 0.0;                    // smallest ladder radius with outside mass <= 1e-6
  std::vector<double> radii;
  std::vector<double> fraction_outside;
  bool monotone = true;
};

namespace detail {

// Radial l2 mass profile of the inverse transform of a sampled map.
class MassProfile {
 public:
  explicit MassProfile(const SpectralMap& m) {
    const FrequencyGrid& g = m.grid;
    Raster<Complex> spatial = inverse_raster(g, complexify(m.values));
    mass_.reserve(g.size());
    for (std::size_t i = 0; i < g.n1(); ++i)
      for (std::size_t j = 0; j < g.n2(); ++j) mass_.emplace_back(std::hypot(g.x1(i), g.x2(j)), std::norm(spatial(i, j)));
    std::sort(mass_.begin(), mass_.end());
    suffix_.assign(mass_.size() + 1, 0.0);
    for (std::size_t k = mass_.size(); k-- > 0;) suffix_[k] = suffix_[k + 1] + mass_[k].second;
  }

  // fraction of the mass at radius > r
  double outside(double r) const {
    if (!(suffix_[0] > 0.0)) return 0.0;
    auto it = std::upper_bound(mass_.begin(), mass_.end(), std::make_pair(r, std::numeric_limits<double>::infinity()));
    return suffix_[static_cast<std::size_t>(it - mass_.begin())] / suffix_[0];
  }

 private:
  std::vector<std::pair<double, double>> mass_;
  std::vector<double> suffix_;
};

}  // namespace detail

/// Mass profile of the inverse transform of Delta, with the window's
/// fraction outside the test radius alongside.
inline SupportReport verify_window_support(const FrameSpectrum& fs, const ShearletGenerator& gen) {
  SupportReport rep;
  rep.A = gen.support_radius();
  rep.r1 = 2.0 * std::sqrt(3.0 + std::sqrt(5.0)) * rep.A;
  rep.r2 = 2.0 * shear_norm_bound(2.0) * rep.A;
  rep.test_radius = 1.05 * std::max(rep.r1, rep.r2);
  const FrequencyGrid& g = fs.grid;
  const detail::MassProfile delta(fs.delta), window(fs.win0);
  const double rmax = 0.5 * std::min(g.period1(), g.period2());
  double prev = 1.0;
  for (double r = 2.0 * g.space_step(); r <= rmax; r *= std::pow(2.0, 0.125)) {
    const double f = delta.outside(r);
    rep.radii.push_back(r);
    rep.fraction_outside.push_back(f);
    if (f > prev) rep.monotone = false;
    prev = f;
    if (rep.radius_1e6 == 0.0 && f <= 1e-6) rep.radius_1e6 = r;
  }
  rep.fraction_outside_test = delta.outside(rep.test_radius);
  rep.window_fraction_outside_test = window.outside(rep.test_radius);
  return rep;
}

}  // namespace conewave
