#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "conewave/error.hpp"
#include "conewave/generator.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sinc_integrals.hpp"

namespace conewave {

enum class CpsiMethod { Direct, Group, Reference };

inline const char* to_string(CpsiMethod m) {
  switch (m) {
    case CpsiMethod::Direct: return "direct";
    case CpsiMethod::Group: return "group";
    default: return "reference";
  }
}

/// C_psi is the integral of |psi^(w)|^2 / w1^2 over the half plane w1 > 0,
/// which is what the scale-shear group integral over a > 0, s real returns
/// at every xi with xi1 != 0.
struct AdmissibilityConstant {
  double value = 0.0;
  CpsiMethod method = CpsiMethod::Direct;
  double error = 0.0;
};

struct MomentProfile {
  int M = 0;
  int L1 = 0;
  int L2 = 0;
  int N = 0;
  double theta_sup = 0.0;
  double theta_sup_sq = 0.0;
  double admissibility_integral = 0.0;  // full plane, |psi^|^2 / |w1|^(2M)
  double admissibility_error = 0.0;
  bool relation_holds = false;  // 2M - 1/2 > L2 > M >= 1
  bool admissible = false;
  std::string message;
};

namespace detail {

// |psi^|^2 with u along the moment direction, whatever the orientation.
inline double moment_frame_sq(const ShearletGenerator& gen, double u, double v) {
  return gen.horizontal_spectrum_sq(u, v);
}

inline double sin_power_mean(int p) { return binomial(p, p / 2) * std::ldexp(1.0, -p); }

// int_{u>0} int_v |psi^(u,v)|^2 / u^power dv du by nested adaptive Gauss-Kronrod
// on unit panels over [0, U] x [-V, V] plus envelope tail estimates.
// side = -1 integrates the left half plane instead.
inline QuadResult half_plane_moment_integral(const ShearletGenerator& gen, int power, double rel_tol,
                                             double side = 1.0, double extent = 48.0) {
  const double V = extent, U = extent;
  std::vector<double> vbreaks, ubreaks;
  for (double v = -V; v <= V; v += 1.0) vbreaks.push_back(v);
  for (double u = 0.0; u <= U; u += 1.0) ubreaks.push_back(u);
  const double v_tail_factor = 2.0 * sin_power_mean(2 * gen.m2) * std::pow(std::numbers::pi, -2.0 * gen.m2) *
                               std::pow(V, 1.0 - 2.0 * gen.m2) / (2.0 * gen.m2 - 1.0);
  double inner_error = 0.0;
  auto outer = [&](double u) {
    auto inner = [&](double v) { return moment_frame_sq(gen, side * u, v); };
    // Panels far out carry tiny mass; tolerance is absolute against the peak.
    const double peak = moment_frame_sq(gen, side * u, 0.0);
    QuadResult r = integrate_panels(inner, vbreaks, 0.0, rel_tol * 1e-2 * peak / static_cast<double>(vbreaks.size()));
    const double tail = peak * v_tail_factor;
    inner_error = std::max(inner_error, r.error / std::max(std::abs(r.value), 1e-300));
    return (r.value + tail) / ipow(u, power);
  };
  QuadResult out = integrate_panels(outer, ubreaks, rel_tol * 1e-1, 0.0);
  // Outer tail: |psi^|^2/u^power <= amp^2 (2 pi)^2M u^(2M-power) (pi u)^(-2 m1) * I_v.
  const double iv = 2.0 * sinc_table(0, 2 * gen.m2).total();
  const double expo = 2.0 * gen.M - power - 2.0 * gen.m1;
  double tail = 0.0;
  if (expo < -1.0) {
    tail = gen.amplitude * gen.amplitude * std::pow(2.0 * std::numbers::pi, 2.0 * gen.M) *
           std::pow(std::numbers::pi, -2.0 * gen.m1) * sin_power_mean(2 * gen.m1) * iv * std::pow(U, expo + 1.0) /
           (-(expo + 1.0));
  } else {
    tail = std::numeric_limits<double>::infinity();
  }
  out.value += tail;
  out.error += std::abs(out.value) * inner_error + 0.5 * tail;
  return out;
}

}  // namespace detail

/// Closed-form route through the sinc moment tables.
inline double cpsi_reference_value(const ShearletGenerator& gen) {
  const double k = gen.amplitude * gen.amplitude * std::pow(2.0 * std::numbers::pi, 2 * gen.M);
  return k * sinc_table(2 * gen.M - 2, 2 * gen.m1).total() * 2.0 * sinc_table(0, 2 * gen.m2).total();
}

/// Truncated group integral at a reference frequency xi (xi1 != 0):
/// a*|xi1| in [2^-L, X], sqrt(a)(xi2 - s xi1) in [-Y, Y].
inline QuadResult group_integral(const ShearletGenerator& gen, double xi1, double xi2, int L, double X, double Y,
                                 double rel_tol = 1e-11) {
  if (xi1 == 0.0) throw InvalidArgument("group form needs a reference frequency with xi1 != 0");
  const ShearletGenerator h = horizontal_of(gen);
  // For a vertical generator the roles of the coordinates swap.
  if (gen.orientation == Orientation::Vertical) std::swap(xi1, xi2);
  if (xi1 == 0.0) throw InvalidArgument("group form needs a reference frequency off the generator's null line");
  const double ax = std::abs(xi1);
  std::vector<double> abreaks;
  for (int k = L; k >= 1; --k) abreaks.push_back(std::ldexp(1.0, -k) / ax);
  for (double w = 1.0; w <= X; w += 1.0) abreaks.push_back(w / ax);
  auto outer = [&](double a) {
    const double ra = std::sqrt(a);
    // w2 = ra (xi2 - s xi1) on unit intervals in [-Y, Y].
    std::vector<double> sb;
    for (double w = -Y; w <= Y; w += 1.0) sb.push_back((xi2 - w / ra) / xi1);
    std::sort(sb.begin(), sb.end());
    auto inner = [&](double s) { return h.horizontal_spectrum_sq(a * xi1, ra * (xi2 - s * xi1)); };
    return integrate_panels(inner, sb, rel_tol, 0.0).value * std::pow(a, -1.5);
  };
  return integrate_panels(outer, abreaks, rel_tol, 0.0);
}

inline AdmissibilityConstant compute_admissibility_constant(const ShearletGenerator& gen, CpsiMethod method,
                                                            double ref_xi1 = 1.0, double ref_xi2 = 0.375) {
  AdmissibilityConstant out;
  out.method = method;
  if (method == CpsiMethod::Reference) {
    out.value = cpsi_reference_value(gen);
    out.error = 1e-14 * out.value;
    return out;
  }
  if (method == CpsiMethod::Direct) {
    QuadResult r = detail::half_plane_moment_integral(gen, 2, 1e-10);
    out.value = r.value;
    out.error = r.error;
    return out;
  }
  int L = 8;
  double X = 8.0, Y = 8.0;
  QuadResult prev = group_integral(gen, ref_xi1, ref_xi2, L, X, Y);
  for (int iter = 0; iter < 5; ++iter) {
    L *= 2;
    X *= 2.0;
    Y *= 2.0;
    QuadResult next = group_integral(gen, ref_xi1, ref_xi2, L, X, Y);
    const double change = std::abs(next.value - prev.value);
    if (change < 1e-5 * std::abs(next.value)) {
      out.value = next.value;
      out.error = change + next.error;
      return out;
    }
    prev = next;
    if (iter == 4) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "group-form truncation did not settle: last iterates " << prev.value << " and " << next.value;
      throw ConvergenceFailure(msg.str());
    }
  }
  return out;
}

/// Grid search plus pattern-search refinement of sup f over [-R, R]^2.
template <class F>
double locate_supremum(F&& f, double R, std::size_t samples = 201) {
  double best = -std::numeric_limits<double>::infinity();
  double bx = 0.0, by = 0.0;
  const double step = 2.0 * R / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i)
    for (std::size_t j = 0; j < samples; ++j) {
      const double x = -R + step * i, y = -R + step * j;
      const double v = f(x, y);
      if (v > best) best = v, bx = x, by = y;
    }
  // Coordinate refinement with shrinking steps.
  double h = step;
  for (int it = 0; it < 60 && h > 1e-12; ++it) {
    bool moved = false;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        const double v = f(bx + dx * h, by + dy * h);
        if (v > best) best = v, bx += dx * h, by += dy * h, moved = true;
      }
    if (!moved) h *= 0.5;
  }
  return best;
}

inline MomentProfile check_admissibility(const ShearletGenerator& gen) {
  MomentProfile p;
  p.M = gen.M;
  p.L1 = gen.L1();
  p.L2 = gen.L2();
  p.N = gen.N();
  p.relation_holds = (2.0 * gen.M - 0.5 > gen.L2()) && (gen.L2() > gen.M) && gen.M >= 1;
  p.theta_sup = locate_supremum([&](double u, double v) { return std::abs(gen.theta_spectrum(u, v)); }, 4.0);
  p.theta_sup_sq = p.theta_sup * p.theta_sup;
  QuadResult right = detail::half_plane_moment_integral(gen, 2 * gen.M, 1e-8, 1.0);
  QuadResult left = detail::half_plane_moment_integral(gen, 2 * gen.M, 1e-8, -1.0);
  p.admissibility_integral = right.value + left.value;
  p.admissibility_error = right.error + left.error;
  p.admissible = std::isfinite(p.admissibility_integral) && p.admissibility_error < 1e-6 * p.admissibility_integral;
  if (!p.admissible) p.message = "admissibility integral estimate diverges or did not converge";
  if (!(p.N > 0)) p.message += (p.message.empty() ? "" : "; ") + std::string("decay order N is not positive");
  if (!p.relation_holds)
    p.message += (p.message.empty() ? "" : "; ") + std::string("relation 2M-1/2 > L2 > M >= 1 fails");
  return p;
}

}  // namespace conewave
