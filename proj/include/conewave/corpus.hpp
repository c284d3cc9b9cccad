#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "conewave/error.hpp"
#include "conewave/fft.hpp"
#include "conewave/grid.hpp"

namespace conewave {

// Deterministic test fields. Widths default to fractions of the spatial
// period L so that every field is below 1e-12 at the lattice boundary.

inline SpatialField gaussian_blob(const FrequencyGrid& g, double width = 0.0, double c1 = 0.0, double c2 = 0.0) {
  if (width <= 0.0) width = std::min(g.period1(), g.period2()) / 16.0;
  SpatialField f(g);
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double d1 = g.x1(i) - c1, d2 = g.x2(j) - c2;
      f.values(i, j) = std::exp(-(d1 * d1 + d2 * d2) / (2.0 * width * width));
    }
  return f;
}

/// erf edge along the line x1 + s0 x2 = 0 (normal direction (1, s0)) with
/// blur eps, under a Gaussian envelope.
inline SpatialField smoothed_edge(const FrequencyGrid& g, double s0, double eps = 0.0, double envelope = 0.0) {
  if (eps <= 0.0) eps = 2.0 * g.space_step();
  if (envelope <= 0.0) envelope = std::min(g.period1(), g.period2()) / 16.0;
  const double n = std::hypot(1.0, s0);
  SpatialField f(g);
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double x1 = g.x1(i), x2 = g.x2(j);
      const double r2 = x1 * x1 + x2 * x2;
      f.values(i, j) = std::erf((x1 + s0 * x2) / (n * eps)) * std::exp(-r2 / (2.0 * envelope * envelope));
    }
  return f;
}

/// Real field whose spectrum is a Gaussian ring at radius r0 (width
/// radial_sigma) times exp(-sin^2(theta) / (2 angular_sigma^2)), theta the
/// angle to the xi1 axis. Both factors are smooth away from the origin.
inline SpatialField cone_bandpass(const FrequencyGrid& g, double r0, double radial_sigma, double angular_sigma) {
  SampledSpectrum s(g, true);
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double x1 = g.xi1(i), x2 = g.xi2(j);
      const double r = std::hypot(x1, x2);
      if (r == 0.0) continue;
      const double dr = (r - r0) / radial_sigma, dt = x2 / (r * angular_sigma);
      s.values(i, j) = std::exp(-0.5 * (dr * dr + dt * dt));
    }
  SpatialField f = inverse_field(s);
  return f;
}

/// Default cone-localized field: ring at 5/16 of the extent, so its energy
/// sits in [extent/8, extent/2] radially and well inside |xi2| <= |xi1|.
inline SpatialField default_cone_bandpass(const FrequencyGrid& g) {
  const double e = g.extent();
  return cone_bandpass(g, 0.3125 * e, 0.0375 * e, 0.25);
}

struct CorpusEntry {
  std::string name;
  SpatialField field;
};

/// Gaussian blob, edges of slope 0, 1/2, 1, 2, and the cone-localized field.
inline std::vector<CorpusEntry> reference_corpus(const FrequencyGrid& g) {
  std::vector<CorpusEntry> out;
  out.push_back({"blob", gaussian_blob(g)});
  for (double s0 : {0.0, 0.5, 1.0, 2.0}) out.push_back({"edge_s" + std::to_string(s0).substr(0, 3), smoothed_edge(g, s0)});
  out.push_back({"cone_bandpass", default_cone_bandpass(g)});
  return out;
}

}  // namespace conewave
