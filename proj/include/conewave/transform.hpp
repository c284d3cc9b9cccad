#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conewave/cone.hpp"
#include "conewave/decay.hpp"
#include "conewave/error.hpp"
#include "conewave/fft.hpp"
#include "conewave/generator.hpp"
#include "conewave/grid.hpp"
#include "conewave/parallel.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sinc_integrals.hpp"
#include "conewave/window.hpp"

namespace conewave {

// Shearlets are L2-normalized:
//   psi_ast(x) = a^(-3/4) psi(A_a^-1 S_s^-1 (x - t)),
// and the spectrum of the node (a, s) is taken as
//   a^(3/4) psi^(a xi1, sqrt(a)(xi2 - s xi1)),
// i.e. node s carries the spatial shear -s. The shear range is symmetric so
// every aggregate over s is unaffected.

enum class FilterTag { None, Q0, Q1, P0, P1 };

inline const char* to_string(FilterTag f) {
  switch (f) {
    case FilterTag::None: return "none";
    case FilterTag::Q0: return "q0";
    case FilterTag::Q1: return "q1";
    case FilterTag::P0: return "p0";
    case FilterTag::P1: return "p1";
  }
  return "?";
}

inline FilterTag parse_filter(const std::string& s) {
  if (s == "none") return FilterTag::None;
  if (s == "q0") return FilterTag::Q0;
  if (s == "q1") return FilterTag::Q1;
  if (s == "p0") return FilterTag::P0;
  if (s == "p1") return FilterTag::P1;
  throw InvalidArgument("unknown filter tag '" + s + "'");
}

struct CoefficientNode {
  double a = 0.0;
  double s = 0.0;
  double weight = 0.0;  // a^-3 da ds weight of the node
  Raster<Complex> values;
};

/// <f, filter * psi_ast> for every scheme node, over the translation lattice.
struct CoefficientField {
  FrequencyGrid grid;
  FilterTag filter = FilterTag::None;
  Orientation orientation = Orientation::Horizontal;
  std::string normalization = "l2";
  std::vector<CoefficientNode> nodes;

  /// sum_n w_n h^2 sum_t c_n(t) conj(d_n(t))
  Complex inner(const CoefficientField& other) const {
    if (other.nodes.size() != nodes.size()) throw ContractViolation("coefficient fields have different node sets");
    const double h2 = grid.space_step() * grid.space_step();
    Complex sum = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      Complex part = 0.0;
      const auto& c = nodes[n].values;
      const auto& d = other.nodes[n].values;
      for (std::size_t k = 0; k < c.size(); ++k) part += c[k] * std::conj(d[k]);
      sum += nodes[n].weight * h2 * part;
    }
    return sum;
  }
};

/// a^(3/4) psi^(a xi1, sqrt(a)(xi2 - s xi1)) on the grid.
inline Raster<Complex> node_spectrum(const ShearletGenerator& gen, double a, double s, const FrequencyGrid& grid) {
  Raster<Complex> out(grid.n1(), grid.n2());
  const double norm = std::pow(a, 0.75);
  for (std::size_t i = 0; i < grid.n1(); ++i)
    for (std::size_t j = 0; j < grid.n2(); ++j) out(i, j) = norm * gen.sheared(a, s, grid.xi1(i), grid.xi2(j));
  return out;
}

namespace detail {

inline const SpectralMap* filter_map(FilterTag filter, const ConeProjectionSet* cones) {
  if (filter == FilterTag::None) return nullptr;
  if (!cones) throw InvalidArgument(std::string("filter ") + to_string(filter) + " needs cone projections");
  switch (filter) {
    case FilterTag::Q0: return &cones->q0;
    case FilterTag::Q1: return &cones->q1;
    case FilterTag::P0: return &cones->p0;
    case FilterTag::P1: return &cones->p1;
    default: return nullptr;
  }
}

inline void require_measure(const ScaleShearScheme& scheme, MeasureTag tag, const char* who) {
  if (scheme.measure != tag)
    throw ContractViolation(std::string(who) + ": scheme measure tag is " + std::to_string(measure_exponent(scheme.measure)) +
                            ", expected " + std::to_string(measure_exponent(tag)));
}

// f^ conj(S_n) filter for one node, transformed back to the t lattice.
inline Raster<Complex> node_coefficients(const SampledSpectrum& fhat, const ShearletGenerator& gen, double a, double s,
                                         const SpectralMap* filter) {
  const FrequencyGrid& g = fhat.grid;
  Raster<Complex> spec = node_spectrum(gen, a, s, g);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] = fhat.values[k] * std::conj(spec[k]);
    if (filter) spec[k] *= filter->values[k];
  }
  return inverse_raster(g, spec);
}

inline double raster_energy(const Raster<Complex>& r, double area) {
  double sum = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) sum += std::norm(r[k]);
  return sum * area;
}

}  // namespace detail

/// Shearlet analysis over all nodes of a scheme with the a^-3 measure tag.
inline CoefficientField analyze(const SpatialField& f, const ShearletGenerator& gen, const ScaleShearScheme& scheme,
                                FilterTag filter = FilterTag::None, const ConeProjectionSet* cones = nullptr) {
  detail::require_measure(scheme, MeasureTag::MinusThree, "analyze");
  const SpectralMap* fm = detail::filter_map(filter, cones);
  if (fm) require_same_grid(f.grid, fm->grid, "field and filter");
  const SampledSpectrum fhat = forward_spectrum(f);
  CoefficientField out;
  out.grid = f.grid;
  out.filter = filter;
  out.orientation = gen.orientation;
  out.nodes.resize(scheme.size());
  parallel_for(scheme.size(), [&](std::size_t n) {
    const SchemeNode node = scheme.node(n);
    out.nodes[n] = {node.a, node.s, node.weight, detail::node_coefficients(fhat, gen, node.a, node.s, fm)};
  });
  return out;
}

/// Adjoint of analyze: F^-1(sum_n w_n S_n filter F(c_n)).
inline Raster<Complex> synthesize_from(const CoefficientField& c, const ShearletGenerator& gen,
                                       const ConeProjectionSet* cones = nullptr) {
  const FrequencyGrid& g = c.grid;
  const SpectralMap* fm = detail::filter_map(c.filter, cones);
  std::vector<Raster<Complex>> parts(c.nodes.size());
  parallel_for(c.nodes.size(), [&](std::size_t n) {
    const CoefficientNode& node = c.nodes[n];
    Raster<Complex> spec = forward_raster(g, node.values);
    Raster<Complex> s = node_spectrum(gen, node.a, node.s, g);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      spec[k] *= node.weight * s[k];
      if (fm) spec[k] *= fm->values[k];
    }
    parts[n] = std::move(spec);
  });
  Raster<Complex> total(g.n1(), g.n2());
  for (const auto& p : parts)  // node order, whatever the worker count
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += p[k];
  return inverse_raster(g, total);
}

enum class LowpassTag { Phi, Phi0, Phi1 };

/// <f, T_t phi> (or phi0, phi1) over the translation lattice.
inline Raster<Complex> lowpass_analyze(const SpatialField& f, const FrameSpectrum& fs, LowpassTag which = LowpassTag::Phi) {
  require_same_grid(f.grid, fs.grid, "field and frame spectrum");
  SampledSpectrum fhat = forward_spectrum(f);
  for (std::size_t k = 0; k < fhat.values.size(); ++k) {
    double m = 0.0;
    switch (which) {
      case LowpassTag::Phi: m = fs.phi.values[k]; break;
      case LowpassTag::Phi0: m = std::sqrt(fs.win0.values[k]); break;
      case LowpassTag::Phi1: m = std::sqrt(fs.win1.values[k]); break;
    }
    fhat.values[k] *= m;
  }
  return inverse_raster(f.grid, fhat.values);
}

/// Three-term energy ledger of the q-filtered representation.
struct EnergyLedger {
  double E1 = 0.0;  // q0-filtered horizontal shearlets
  double E2 = 0.0;  // q1-filtered vertical shearlets
  double E3 = 0.0;  // phi window
  double norm_sq = 0.0;
  double cpsi = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // undefined for f = 0
  // Same sums evaluated on the frequency side: int |f^|^2 p0 Delta_S, int |f^|^2 p1 Delta_nu_S.
  double E1_closed = 0.0;
  double E2_closed = 0.0;
  std::vector<double> node_energy_h, node_energy_v;  // weighted, in node order
};

inline EnergyLedger parseval_report(const SpatialField& f, const ShearletGenerator& gen, const FrameSpectrum& fs,
                                    const ConeProjectionSet& cones, const ScaleShearScheme& scheme) {
  require_same_grid(f.grid, fs.grid, "field and frame spectrum");
  require_same_grid(f.grid, cones.grid, "field and cone projections");
  const FrequencyGrid& g = f.grid;
  const ScaleShearScheme s3 = scheme.with_measure(MeasureTag::MinusThree);
  const ShearletGenerator h = horizontal_of(gen), v = transpose_generator(h);
  const SampledSpectrum fhat = forward_spectrum(f);
  const double h2 = g.space_step() * g.space_step();
  EnergyLedger led;
  led.cpsi = fs.cpsi;
  led.node_energy_h.assign(s3.size(), 0.0);
  led.node_energy_v.assign(s3.size(), 0.0);
  parallel_for(2 * s3.size(), [&](std::size_t task) {
    const std::size_t n = task / 2;
    const SchemeNode node = s3.node(n);
    if (task % 2 == 0) {
      led.node_energy_h[n] =
          node.weight * detail::raster_energy(detail::node_coefficients(fhat, h, node.a, node.s, &cones.q0), h2);
    } else {
      led.node_energy_v[n] =
          node.weight * detail::raster_energy(detail::node_coefficients(fhat, v, node.a, node.s, &cones.q1), h2);
    }
  });
  for (double e : led.node_energy_h) led.E1 += e;
  for (double e : led.node_energy_v) led.E2 += e;
  led.E3 = detail::raster_energy(lowpass_analyze(f, fs, LowpassTag::Phi), h2);
  const double area = g.cell_area();
  for (std::size_t k = 0; k < g.size(); ++k) led.norm_sq += std::norm(fhat.values[k]) * area;
  if (!s3.empty()) {
    const ScaleShearScheme s15 = scheme.with_measure(MeasureTag::MinusThreeHalves);
    const SpectralMap dh = compute_delta(h, g, s15), dv = compute_delta(v, g, s15);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double e = std::norm(fhat.values[k]) * area;
      led.E1_closed += e * cones.p0.values[k] * dh.values[k];
      led.E2_closed += e * cones.p1.values[k] * dv.values[k];
    }
  }
  if (led.norm_sq > 0.0) led.ratio = (led.E1 + led.E2 + led.E3) / (led.cpsi * led.norm_sq);
  return led;
}

/// f = f_high + f_low with the parts of each.
struct Decomposition {
  SpatialField input;
  SpatialField f_high, f_low;
  SpatialField horizontal, vertical;  // f_high = horizontal + vertical
  SpatialField low0, low1;            // f_low = low0 + low1
  double cpsi = 0.0;

  /// ||f - f_high - f_low|| / ||f||
  double reconstruction_error() const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < input.values.size(); ++k) {
      const double r = input.values[k] - f_high.values[k] - f_low.values[k];
      num += r * r;
      den += input.values[k] * input.values[k];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }
};

namespace detail {

inline SpatialField apply_multiplier(const SampledSpectrum& fhat, const Raster<double>& m, double scale) {
  SampledSpectrum s = fhat;
  for (std::size_t k = 0; k < s.values.size(); ++k) s.values[k] *= m[k] * scale;
  return inverse_field(s);
}

inline SpatialField add_fields(const SpatialField& a, const SpatialField& b) {
  SpatialField out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += b.values[k];
  return out;
}

}  // namespace detail

/// Frequency-side assembly of the p-filtered representation:
///   f_high^ = f^ (p0 Delta_S + p1 Delta_nu_S) / C,
///   f_low^  = f^ (p0 |phi0^|^2 + p1 |phi1^|^2) / C,
/// where Delta_S is the scheme quadrature used by analysis. Each term equals
/// the node-wise synthesis of <f, psi_ast> against p * psi_ast.
inline Decomposition synthesize(const SpatialField& f, const ShearletGenerator& gen, const FrameSpectrum& fs,
                                const ConeProjectionSet& cones, const ScaleShearScheme& scheme) {
  require_same_grid(f.grid, fs.grid, "field and frame spectrum");
  require_same_grid(f.grid, cones.grid, "field and cone projections");
  const FrequencyGrid& g = f.grid;
  const ShearletGenerator h = horizontal_of(gen), v = transpose_generator(h);
  const SampledSpectrum fhat = forward_spectrum(f);
  const double inv = 1.0 / fs.cpsi;
  Raster<double> mh(g.n1(), g.n2()), mv(g.n1(), g.n2()), m0(g.n1(), g.n2()), m1(g.n1(), g.n2());
  if (!scheme.empty()) {
    const ScaleShearScheme s15 = scheme.with_measure(MeasureTag::MinusThreeHalves);
    const SpectralMap dh = compute_delta(h, g, s15), dv = compute_delta(v, g, s15);
    for (std::size_t k = 0; k < g.size(); ++k) {
      mh[k] = cones.p0.values[k] * dh.values[k];
      mv[k] = cones.p1.values[k] * dv.values[k];
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    m0[k] = cones.p0.values[k] * fs.win0.values[k];
    m1[k] = cones.p1.values[k] * fs.win1.values[k];
  }
  Decomposition d;
  d.input = f;
  d.cpsi = fs.cpsi;
  d.horizontal = detail::apply_multiplier(fhat, mh, inv);
  d.vertical = detail::apply_multiplier(fhat, mv, inv);
  d.low0 = detail::apply_multiplier(fhat, m0, inv);
  d.low1 = detail::apply_multiplier(fhat, m1, inv);
  d.f_high = detail::add_fields(d.horizontal, d.vertical);
  d.f_low = detail::add_fields(d.low0, d.low1);
  return d;
}

/// Eight lattice directions, one every ~22.5 degrees of the half plane.
inline std::vector<std::pair<double, double>> flow_decay_rays() {
  return {{1, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 1}, {-1, 2}, {-1, 1}, {-2, 1}};
}

namespace detail {

// RMS of |spec| over the samples within radius r/8 of r * d/|d|.
inline double ray_sample(const SampledSpectrum& spec, double d1, double d2, double r) {
  const FrequencyGrid& g = spec.grid;
  const double n = std::hypot(d1, d2);
  const double c1 = r * d1 / n, c2 = r * d2 / n, rad = r / 8.0;
  const auto lo1 = static_cast<long>(std::ceil((c1 - rad) / g.spacing1())),
             hi1 = static_cast<long>(std::floor((c1 + rad) / g.spacing1()));
  const auto lo2 = static_cast<long>(std::ceil((c2 - rad) / g.spacing2())),
             hi2 = static_cast<long>(std::floor((c2 + rad) / g.spacing2()));
  double sum = 0.0;
  std::size_t count = 0;
  for (long a = lo1; a <= hi1; ++a)
    for (long b = lo2; b <= hi2; ++b) {
      const double x = a * g.spacing1(), y = b * g.spacing2();
      if (std::hypot(x - c1, y - c2) > rad) continue;
      const long i = a + static_cast<long>(g.center1()), j = b + static_cast<long>(g.center2());
      if (i < 0 || j < 0 || i >= static_cast<long>(g.n1()) || j >= static_cast<long>(g.n2())) continue;
      sum += std::norm(spec.values(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
      ++count;
    }
  return count ? std::sqrt(sum / count) : 0.0;
}

}  // namespace detail

/// Decay of |f_low^| relative to |f^| along rays. A ray passes when
/// slope(f_low) <= slope(f) - N + 1/4. Rays where f^ is negligible or already
/// decays like |xi|^-N are dropped; the report is vacuous if none remain.
inline DecayReport verify_flow_decay(const Decomposition& dec, int N,
                                     std::vector<std::pair<double, double>> rays = flow_decay_rays(),
                                     int lo_exp = 2) {
  const SampledSpectrum fh = forward_spectrum(dec.input), lh = forward_spectrum(dec.f_low);
  const FrequencyGrid& g = fh.grid;
  std::vector<double> radii;
  for (int e = lo_exp;; ++e) {
    const double r = std::ldexp(1.0, e);
    if (r * 9.0 / 8.0 > g.extent()) break;
    radii.push_back(r);
  }
  double peak = 0.0;
  for (const Complex& z : fh.values.values()) peak = std::max(peak, std::abs(z));
  DecayReport rep;
  rep.subject = "f_low";
  rep.N = N;
  rep.threshold = -N + 0.25;
  bool any = false, all_ok = true;
  for (auto [d1, d2] : rays) {
    RayFit ray;
    ray.d1 = d1;
    ray.d2 = d2;
    std::vector<double> fv;
    for (double r : radii) {
      ray.radii.push_back(r);
      fv.push_back(detail::ray_sample(fh, d1, d2, r));
      ray.values.push_back(detail::ray_sample(lh, d1, d2, r));
    }
    // Drop radii where f^ itself is at round-off level.
    std::vector<double> rr, ff, ll;
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (fv[k] > 1e-10 * peak) rr.push_back(radii[k]), ff.push_back(fv[k]), ll.push_back(ray.values[k]);
    const LineFit ref = fit_loglog(rr, ff), low = fit_loglog(rr, ll);
    ray.reference_slope = ref.slope;
    ray.slope = low.slope;
    ray.used = std::min(ref.used, low.used);
    if (rr.size() < 4 || ray.used < 4) {
      ray.included = false;
      ray.pass = true;
      ray.note = "vacuous: f^ negligible along this ray";
    } else if (ref.slope <= -N) {
      ray.included = false;
      ray.pass = true;
      ray.note = "vacuous: f^ already decays like |xi|^-N";
    } else {
      any = true;
      ray.pass = ray.slope <= ref.slope + rep.threshold;
      all_ok = all_ok && ray.pass;
    }
    rep.rays.push_back(ray);
  }
  if (radii.size() < 4) rep.inconclusive = true;
  rep.vacuous = !any;
  rep.passed = any && all_ok && !rep.inconclusive;
  return rep;
}

/// Locality threshold max(r1, r2) + B + margin.
inline double locality_threshold(const ShearletGenerator& gen, const BumpDescriptor& bump, double margin = 1.0) {
  const double A = gen.support_radius();
  const double r = std::max(2.0 * std::sqrt(3.0 + std::sqrt(5.0)) * A, 2.0 * shear_norm_bound(2.0) * A);
  return r + bump.support_radius() + margin;
}

/// f_low = F^-1(f^ (p0 |phi0^|^2 + p1 |phi1^|^2)) / C.
inline SpatialField lowpass_part(const SpatialField& f, const FrameSpectrum& fs, const ConeProjectionSet& cones) {
  require_same_grid(f.grid, fs.grid, "field and frame spectrum");
  require_same_grid(f.grid, cones.grid, "field and cone projections");
  Raster<double> m(f.grid.n1(), f.grid.n2());
  for (std::size_t k = 0; k < m.size(); ++k)
    m[k] = cones.p0.values[k] * fs.win0.values[k] + cones.p1.values[k] * fs.win1.values[k];
  return detail::apply_multiplier(forward_spectrum(f), m, 1.0 / fs.cpsi);
}

/// Periodic distance on the spatial lattice between samples (i, j) and (k, l).
inline double lattice_distance(const FrequencyGrid& g, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  auto wrap = [](double d, double period) {
    d = std::fmod(std::abs(d), period);
    return std::min(d, period - d);
  };
  const double h = g.space_step();
  return std::hypot(wrap((static_cast<double>(i) - static_cast<double>(k)) * h, g.period1()),
                    wrap((static_cast<double>(j) - static_cast<double>(l)) * h, g.period2()));
}

/// Tensor B-spline bump of order m and knot spacing tau centred at (c1, c2)
/// (spatial coordinates, wrapped onto the periodic lattice), unit peak.
inline SpatialField spline_bump(const FrequencyGrid& g, double c1, double c2, double tau, int order = 8) {
  auto bspline = [order](double x) {
    // centred cardinal B-spline via the truncated-power formula
    double sum = 0.0;
    const double half = 0.5 * order;
    for (int k = 0; k <= order; ++k) {
      const double u = x + half - k;
      if (u > 0.0) sum += ((k % 2) ? -1.0 : 1.0) * binomial(order, k) * ipow(u, order - 1);
    }
    double fact = 1.0;
    for (int k = 2; k < order; ++k) fact *= k;
    return sum / fact;
  };
  const double peak = bspline(0.0);
  SpatialField out(g);
  auto wrapd = [](double d, double period) { return d - period * std::round(d / period); };
  for (std::size_t i = 0; i < g.n1(); ++i) {
    const double u = wrapd(g.x1(i) - c1, g.period1()) / tau;
    if (std::abs(u) >= 0.5 * order) continue;
    const double bu = bspline(u) / peak;
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double v = wrapd(g.x2(j) - c2, g.period2()) / tau;
      if (std::abs(v) >= 0.5 * order) continue;
      out.values(i, j) = bu * bspline(v) / peak;
    }
  }
  return out;
}

struct LocalityResult {
  double radius = 0.0;
  double threshold = 0.0;
  double delta = 0.0;  // |change of f_low(t)| / ||f||
  double f_low_at_t = 0.0;
};

/// Change of f_low at lattice point t when f is altered by `perturbation`,
/// which must vanish on the ball of radius r around t.
inline LocalityResult locality_probe(const SpatialField& f, const FrameSpectrum& fs, const ConeProjectionSet& cones,
                                     const ShearletGenerator& gen, std::size_t ti, std::size_t tj, double r,
                                     const SpatialField& perturbation) {
  require_same_grid(f.grid, perturbation.grid, "field and perturbation");
  LocalityResult res;
  res.radius = r;
  res.threshold = locality_threshold(gen, cones.bump);
  if (r < res.threshold)
    throw PreconditionError("locality radius " + std::to_string(r) + " is below the threshold " +
                            std::to_string(res.threshold));
  const FrequencyGrid& g = f.grid;
  for (std::size_t i = 0; i < g.n1(); ++i)
    for (std::size_t j = 0; j < g.n2(); ++j)
      if (perturbation.values(i, j) != 0.0 && lattice_distance(g, i, j, ti, tj) < r)
        throw InvalidArgument("perturbation does not vanish inside the probe ball");
  const SpatialField base = lowpass_part(f, fs, cones);
  SpatialField g2 = f;
  for (std::size_t k = 0; k < g2.values.size(); ++k) g2.values[k] += perturbation.values[k];
  const SpatialField moved = lowpass_part(g2, fs, cones);
  const double nf = f.norm();
  res.f_low_at_t = base.values(ti, tj);
  const double change = std::abs(moved.values(ti, tj) - base.values(ti, tj));
  res.delta = nf > 0.0 ? change / nf : change;
  return res;
}

struct DependenceScan {
  std::vector<double> distances;  // distance from t to the nearest perturbed sample
  std::vector<double> deltas;
  double measured_radius = std::numeric_limits<double>::quiet_NaN();  // first distance beyond which all deltas <= tol
};

/// Moves a smooth bump (order-8 spline, knot spacing tau, scaled to ||f||)
/// away from t along the four axis directions and records the largest change
/// of f_low(t) at each distance.
inline DependenceScan scan_dependence(const SpatialField& f, const FrameSpectrum& fs, const ConeProjectionSet& cones,
                                      std::size_t ti, std::size_t tj, double tau, const std::vector<double>& distances,
                                      double tol = 1e-8) {
  const FrequencyGrid& g = f.grid;
  const SpatialField base = lowpass_part(f, fs, cones);
  const double nf = f.norm() > 0.0 ? f.norm() : 1.0;
  const double half = 4.0 * tau;
  for (double d : distances)
    if (2.0 * d + 2.0 * half > std::min(g.period1(), g.period2()))
      throw InvalidArgument("scan distance " + std::to_string(d) + " wraps around the periodic lattice");
  DependenceScan scan;
  scan.distances = distances;
  scan.deltas.assign(distances.size(), 0.0);
  parallel_for(distances.size(), [&](std::size_t k) {
    double worst = 0.0;
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& d : dirs) {
      const double c = distances[k] + half;
      SpatialField bump = spline_bump(g, g.x1(ti) + d[0] * c, g.x2(tj) + d[1] * c, tau);
      const double nb = bump.norm();
      SpatialField moved = f;
      for (std::size_t q = 0; q < moved.values.size(); ++q) moved.values[q] += bump.values[q] * nf / nb;
      const SpatialField low = lowpass_part(moved, fs, cones);
      worst = std::max(worst, std::abs(low.values(ti, tj) - base.values(ti, tj)) / nf);
    }
    scan.deltas[k] = worst;
  });
  for (std::size_t k = distances.size(); k-- > 0;) {
    if (scan.deltas[k] > tol) break;
    scan.measured_radius = distances[k];
  }
  return scan;
}

struct IsometryTruncation {
  int a_lo_exp = -8;  // a in [2^a_lo_exp, 2^a_hi_exp]
  int a_hi_exp = 4;
  double s_max = 8.0;  // s in [-s_max, s_max]
};

struct IsometryResult {
  double ratio = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
  IsometryTruncation truncation;
};

/// Truncated full-group energy int a^-3 |<f, psi_ast>|^2 da ds dt / (C_psi ||f||^2).
/// The t integral collapses by Plancherel and the s integral is closed form,
/// leaving a Gauss rule in log2 a (panels 1/8 wide, 8 nodes) per frequency.
inline IsometryResult full_group_isometry_check(const SpatialField& f, const ShearletGenerator& gen,
                                                IsometryTruncation tr = {}) {
  IsometryResult res;
  res.truncation = tr;
  const ShearletGenerator h = horizontal_of(gen);
  const SampledSpectrum fhat = forward_spectrum(f);
  const FrequencyGrid& g = fhat.grid;
  const double area = g.cell_area();
  const SincMomentTable& t2 = sinc_table(0, 2 * h.m2);
  const double K = h.amplitude * h.amplitude * std::pow(2.0 * std::numbers::pi, 2 * h.M);
  const double cpsi = K * sinc_table(2 * h.M - 2, 2 * h.m1).total() * 2.0 * t2.total();
  const GaussRule& rule = gauss_legendre(8);
  std::vector<double> nodes, weights;  // in a, with da folded in
  for (int p = tr.a_lo_exp * 8; p < tr.a_hi_exp * 8; ++p) {
    const double lo = p / 8.0, hi = (p + 1) / 8.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double e = lo + 0.5 * (hi - lo) * (rule.nodes[k] + 1.0);
      const double a = std::exp2(e);
      nodes.push_back(a);
      weights.push_back(0.5 * (hi - lo) * rule.weights[k] * a * std::numbers::ln2);
    }
  }
  double norm_sq = 0.0, peak = 0.0;
  for (const Complex& z : fhat.values.values()) norm_sq += std::norm(z) * area, peak = std::max(peak, std::norm(z));
  if (!(norm_sq > 0.0)) return res;
  const double floor = 1e-30 * peak;  // G <= C, so these samples contribute below round-off
  // Vertical members would swap coordinates; the group form is that of the horizontal generator.
  const bool swap = gen.orientation == Orientation::Vertical;
  std::vector<double> rows(g.n1(), 0.0);
  parallel_for(g.n1(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double e = std::norm(fhat.values(i, j));
      if (e <= floor) continue;
      double x1 = g.xi1(i), x2 = g.xi2(j);
      if (swap) std::swap(x1, x2);
      if (x1 == 0.0) continue;
      const double ax = std::abs(x1);
      double G = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double a = nodes[k], ra = std::sqrt(a), w = a * x1;
        // int_{|s|<=S} sinc^(2 m2)(sqrt(a)(x2 - s x1)) ds
        const double seg = t2.segment(ra * (x2 - tr.s_max * ax), ra * (x2 + tr.s_max * ax)) / (ra * ax);
        G += weights[k] * std::pow(a, -1.5) * ipow(w * w, h.M) * ipow(sinc(w), 2 * h.m1) * seg;
      }
      acc += e * area * K * G;
    }
    rows[i] = acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  res.ratio = total / (cpsi * norm_sq);
  res.defined = true;
  return res;
}

}  // namespace conewave
