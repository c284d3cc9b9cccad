#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "conewave/error.hpp"
#include "conewave/grid.hpp"
#include "conewave/sinc_integrals.hpp"

namespace conewave {

enum class Orientation { Horizontal, Vertical };

inline const char* to_string(Orientation o) { return o == Orientation::Horizontal ? "horizontal" : "vertical"; }

/// psi = d1^M theta with theta = b_m1 (x) b_m2, centered B-splines. The
/// spectrum is amplitude * (-2 pi i xi1)^M * sinc^m1(xi1) * sinc^m2(xi2); the
/// vertical orientation is the same function with the coordinates swapped.
struct ShearletGenerator {
  int M = 2;
  int m1 = 6;
  int m2 = 3;
  double amplitude = 1.0;
  Orientation orientation = Orientation::Horizontal;

  int L1() const { return m1 - M; }
  int L2() const { return m2; }
  int N() const { return 2 * std::min(L2() - M, L1()); }

  /// Half the diagonal of the support box [-m1/2, m1/2] x [-m2/2, m2/2].
  double support_radius() const { return 0.5 * std::hypot(static_cast<double>(m1), static_cast<double>(m2)); }

  // Spectrum of the horizontal member at (u, v); u is the moment direction.
  Complex horizontal_spectrum(double u, double v) const {
    const double mag = amplitude * ipow(2.0 * std::numbers::pi * u, M) * ipow(sinc(u), m1) * ipow(sinc(v), m2);
    switch (((M % 4) + 4) % 4) {  // (-i)^M
      case 0: return {mag, 0.0};
      case 1: return {0.0, -mag};
      case 2: return {-mag, 0.0};
      default: return {0.0, mag};
    }
  }
  double horizontal_spectrum_sq(double u, double v) const {
    const double t = ipow(2.0 * std::numbers::pi * u, M) * ipow(sinc(u), m1) * ipow(sinc(v), m2);
    return amplitude * amplitude * t * t;
  }

  Complex spectrum(double xi1, double xi2) const {
    return orientation == Orientation::Horizontal ? horizontal_spectrum(xi1, xi2) : horizontal_spectrum(xi2, xi1);
  }
  double spectrum_sq(double xi1, double xi2) const {
    return orientation == Orientation::Horizontal ? horizontal_spectrum_sq(xi1, xi2)
                                                  : horizontal_spectrum_sq(xi2, xi1);
  }

  /// Dilated and sheared spectrum psi^(a xi1, sqrt(a)(xi2 - s xi1)). The
  /// vertical member applies the same map to the swapped coordinates, so its
  /// Calderon sum is the transpose of the horizontal one.
  Complex sheared(double a, double s, double xi1, double xi2) const {
    const double ra = std::sqrt(a);
    if (orientation == Orientation::Horizontal) return horizontal_spectrum(a * xi1, ra * (xi2 - s * xi1));
    return horizontal_spectrum(a * xi2, ra * (xi1 - s * xi2));
  }
  double sheared_sq(double a, double s, double xi1, double xi2) const {
    const double ra = std::sqrt(a);
    if (orientation == Orientation::Horizontal) return horizontal_spectrum_sq(a * xi1, ra * (xi2 - s * xi1));
    return horizontal_spectrum_sq(a * xi2, ra * (xi1 - s * xi2));
  }

  /// theta^ for the spline family; sup |theta^| = amplitude at the origin.
  double theta_spectrum(double u, double v) const {
    return orientation == Orientation::Horizontal ? amplitude * ipow(sinc(u), m1) * ipow(sinc(v), m2)
                                                  : amplitude * ipow(sinc(v), m1) * ipow(sinc(u), m2);
  }

  friend bool operator==(const ShearletGenerator&, const ShearletGenerator&) = default;
};

inline void validate_generator(int M, int m1, int m2) {
  if (M < 1) throw ConstraintViolation("moment count violates M >= 1 (M=" + std::to_string(M) + ")");
  if (!(m1 > M))
    throw ConstraintViolation("decay order violates L1 = m1 - M > 0 (m1=" + std::to_string(m1) +
                              ", M=" + std::to_string(M) + ")");
  if (!(m2 > M))
    throw ConstraintViolation("decay order violates L2 > M (L2=" + std::to_string(m2) + ", M=" + std::to_string(M) +
                              ")");
  if (!(m2 < 2.0 * M - 0.5))
    throw ConstraintViolation("decay order violates L2 < 2M - 1/2 (L2=" + std::to_string(m2) +
                              ", 2M-1/2=" + std::to_string(2.0 * M - 0.5) + ")");
}

inline ShearletGenerator make_spline_shearlet(int M, int m1, int m2, double amplitude = 1.0) {
  validate_generator(M, m1, m2);
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw InvalidArgument("amplitude must be positive");
  ShearletGenerator g;
  g.M = M;
  g.m1 = m1;
  g.m2 = m2;
  g.amplitude = amplitude;
  return g;
}

inline ShearletGenerator transpose_generator(const ShearletGenerator& gen) {
  ShearletGenerator t = gen;
  t.orientation = gen.orientation == Orientation::Horizontal ? Orientation::Vertical : Orientation::Horizontal;
  return t;
}

inline ShearletGenerator horizontal_of(const ShearletGenerator& gen) {
  ShearletGenerator h = gen;
  h.orientation = Orientation::Horizontal;
  return h;
}

inline ShearletGenerator preset_generator(int index) {
  if (index == 0) return make_spline_shearlet(2, 6, 3);
  if (index == 1) return make_spline_shearlet(3, 8, 5);
  throw InvalidArgument("unknown generator preset");
}

/// Fills a raster with psi^ sampled on the grid.
inline SampledSpectrum sample_generator(const ShearletGenerator& gen, const FrequencyGrid& grid) {
  SampledSpectrum out(grid, false);
  for (std::size_t i = 0; i < grid.n1(); ++i)
    for (std::size_t j = 0; j < grid.n2(); ++j) out.values(i, j) = gen.spectrum(grid.xi1(i), grid.xi2(j));
  return out;
}

}  // namespace conewave
