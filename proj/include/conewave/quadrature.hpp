#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "conewave/error.hpp"

namespace conewave {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule compute_gauss_legendre(std::size_t n) {
  if (n == 0) throw InvalidArgument("Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 2.0);
  if (n == 1) return rule;
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    return std::make_pair(p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0));
  };
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Cached Gauss-Legendre rule; the reference stays valid for the program lifetime.
inline const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

/// Fixed Gauss rule of order n mapped to [a, b].
template <class F>
double gauss_integrate(F&& f, double a, double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return sum * half;
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
QuadResult gauss_kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double sum = f(c - dx) + f(c + dx);
    kron += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Stops when the summed error
/// estimate is below max(abs_tol, rel_tol*|value|) or max_intervals is reached.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                              std::size_t max_intervals = 2000) {
  struct Piece {
    double a, b;
    QuadResult r;
    bool operator<(const Piece& o) const { return r.error < o.r.error; }
  };
  if (a == b) return {};
  std::priority_queue<Piece> queue;
  Piece first{a, b, detail::gauss_kronrod15(f, a, b)};
  double value = first.r.value, error = first.r.error;
  queue.push(first);
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && queue.size() < max_intervals) {
    Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(worst);
      break;
    }
    Piece left{worst.a, mid, detail::gauss_kronrod15(f, worst.a, mid)};
    Piece right{mid, worst.b, detail::gauss_kronrod15(f, mid, worst.b)};
    value += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!queue.empty()) {
    value += queue.top().r.value;
    error += queue.top().r.error;
    queue.pop();
  }
  return {value, error};
}

/// Adaptive integration over consecutive panels given by breakpoints.
template <class F>
QuadResult integrate_panels(F&& f, const std::vector<double>& breaks, double rel_tol, double abs_tol = 0.0) {
  QuadResult total;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    QuadResult r = integrate_adaptive(f, breaks[k], breaks[k + 1], rel_tol, abs_tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

/// Which power of a the scheme weights absorb.
enum class MeasureTag { Zero, MinusThreeHalves, MinusThree };

inline double measure_exponent(MeasureTag tag) {
  switch (tag) {
    case MeasureTag::Zero:
      return 0.0;
    case MeasureTag::MinusThreeHalves:
      return -1.5;
    case MeasureTag::MinusThree:
      return -3.0;
  }
  throw InvalidArgument("unsupported measure tag");
}

inline MeasureTag parse_measure(double mu) {
  if (mu == 0.0) return MeasureTag::Zero;
  if (mu == -1.5) return MeasureTag::MinusThreeHalves;
  if (mu == -3.0) return MeasureTag::MinusThree;
  throw InvalidArgument("unsupported measure exponent " + std::to_string(mu) + " (expected 0, -1.5 or -3)");
}

struct SchemeNode {
  double a = 0.0;
  double s = 0.0;
  double weight = 0.0;  // scale weight (measure folded in) times shear weight
};

/// Tensor quadrature over (a, s) in (0, 1] x [-2, 2].
///
/// The scale axis is split into `bands` dyadic bands [2^-b, 2^-b+1], each
/// carrying a Gauss-Legendre rule linear in a, plus a final band (0, 2^-bands]
/// integrated with Gauss in v = sqrt(a). Integrands of the Calderon type
/// behave like a^(2M) times a smooth function of sqrt(a) near 0, which the
/// last band integrates without truncation. The shear axis uses a composite
/// Gauss rule.
struct ScaleShearScheme {
  std::size_t bands = 0;
  std::size_t nodes_per_band = 0;
  std::size_t shear_nodes = 0;
  MeasureTag measure = MeasureTag::MinusThreeHalves;

  std::vector<double> scales;         // a_j
  std::vector<double> scale_weights;  // w_j including a_j^mu
  std::vector<int> scale_band;        // band index of a_j; bands for the inner band
  std::vector<double> shears;         // s_k
  std::vector<double> shear_weights;  // v_k

  std::size_t size() const { return scales.size() * shears.size(); }
  bool empty() const { return size() == 0; }

  SchemeNode node(std::size_t n) const {
    const std::size_t j = n / shears.size(), k = n % shears.size();
    return {scales[j], shears[k], scale_weights[j] * shear_weights[k]};
  }

  /// Same nodes with weights re-expressed for another measure tag.
  ScaleShearScheme with_measure(MeasureTag target) const {
    ScaleShearScheme out = *this;
    out.measure = target;
    const double shift = measure_exponent(target) - measure_exponent(measure);
    for (std::size_t j = 0; j < scales.size(); ++j) out.scale_weights[j] = scale_weights[j] * std::pow(scales[j], shift);
    return out;
  }

  /// Applies the scheme to g(a, s); approximates the integral of g * a^mu.
  template <class G>
  double apply(G&& g) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < scales.size(); ++j) {
      double row = 0.0;
      for (std::size_t k = 0; k < shears.size(); ++k) row += shear_weights[k] * g(scales[j], shears[k]);
      sum += scale_weights[j] * row;
    }
    return sum;
  }
};

namespace detail {

inline std::size_t shear_panel_order(std::size_t n) {
  for (std::size_t q : {5u, 4u, 3u})
    if (n % q == 0) return q;
  return n;
}

inline void fill_shears(ScaleShearScheme& scheme, std::size_t shear_nodes) {
  const std::size_t q = shear_panel_order(shear_nodes);
  const std::size_t panels = shear_nodes / q;
  const GaussRule& rule = gauss_legendre(q);
  const double width = 4.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = -2.0 + width * static_cast<double>(p);
    for (std::size_t k = 0; k < q; ++k) {
      scheme.shears.push_back(lo + 0.5 * width * (rule.nodes[k] + 1.0));
      scheme.shear_weights.push_back(0.5 * width * rule.weights[k]);
    }
  }
}

}  // namespace detail

inline ScaleShearScheme build_scale_shear_scheme(std::size_t bands, std::size_t nodes_per_band, std::size_t shear_nodes,
                                                 MeasureTag measure) {
  const double mu = measure_exponent(measure);
  ScaleShearScheme scheme;
  scheme.bands = bands;
  scheme.nodes_per_band = nodes_per_band;
  scheme.shear_nodes = shear_nodes;
  scheme.measure = measure;
  if (bands == 0) return scheme;
  if (nodes_per_band < 2) throw InvalidArgument("nodes_per_band must be at least 2");
  if (shear_nodes < 3) throw InvalidArgument("shear_nodes must be at least 3");
  if (bands > 60) throw InvalidArgument("bands must be at most 60");
  const GaussRule& rule = gauss_legendre(nodes_per_band);
  for (std::size_t b = 1; b <= bands; ++b) {
    const double hi = std::ldexp(1.0, -static_cast<int>(b) + 1), lo = 0.5 * hi;
    for (std::size_t k = 0; k < nodes_per_band; ++k) {
      const double a = lo + 0.5 * (hi - lo) * (rule.nodes[k] + 1.0);
      scheme.scales.push_back(a);
      scheme.scale_weights.push_back(0.5 * (hi - lo) * rule.weights[k] * std::pow(a, mu));
      scheme.scale_band.push_back(static_cast<int>(b) - 1);
    }
  }
  // (0, 2^-bands] in v = sqrt(a): da = 2 v dv.
  const double vmax = std::sqrt(std::ldexp(1.0, -static_cast<int>(bands)));
  for (std::size_t k = 0; k < nodes_per_band; ++k) {
    const double v = 0.5 * vmax * (rule.nodes[k] + 1.0);
    const double a = v * v;
    scheme.scales.push_back(a);
    scheme.scale_weights.push_back(0.5 * vmax * rule.weights[k] * 2.0 * v * std::pow(a, mu));
    scheme.scale_band.push_back(static_cast<int>(bands));
  }
  detail::fill_shears(scheme, shear_nodes);
  return scheme;
}

/// Scheme with explicit shear nodes (diagnostics that need to hit a given
/// shear exactly). Shear weights are set to 1.
inline ScaleShearScheme build_scheme_with_shears(std::size_t bands, std::size_t nodes_per_band,
                                                 const std::vector<double>& shears, MeasureTag measure) {
  ScaleShearScheme scheme = build_scale_shear_scheme(bands, nodes_per_band, 3, measure);
  for (double s : shears)
    if (!(s >= -2.0 && s <= 2.0)) throw InvalidArgument("explicit shear outside [-2, 2]");
  scheme.shears = shears;
  scheme.shear_weights.assign(shears.size(), 1.0);
  scheme.shear_nodes = shears.size();
  return scheme;
}

}  // namespace conewave
