#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conewave/quadrature.hpp"
#include "conewave/sinc_integrals.hpp"

using namespace conewave;

namespace {

// Composite Simpson with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
  for (std::size_t n : {2u, 4u, 8u, 13u}) {
    const GaussRule& rule = gauss_legendre(n);
    for (std::size_t d = 0; d < 2 * n; ++d) {
      const double got = gauss_integrate([d](double x) { return std::pow(x, static_cast<double>(d)); }, 0.0, 1.0, rule);
      EXPECT_NEAR(got, 1.0 / (d + 1.0), 1e-14) << "n=" << n << " degree " << d;
    }
  }
}

TEST(GaussLegendre, WeightsSumToTwo) {
  const GaussRule& rule = gauss_legendre(20);
  double s = 0.0;
  for (double w : rule.weights) s += w;
  EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(Adaptive, SmoothAndPeakedIntegrands) {
  EXPECT_NEAR(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13).value, 2.0, 1e-12);
  // narrow Lorentzian: arctan difference
  auto f = [](double x) { return 1.0 / (1e-6 + x * x); };
  const double exact = 2.0 * std::atan(1.0 / 1e-3) / 1e-3;
  EXPECT_NEAR(integrate_adaptive(f, -1.0, 1.0, 1e-12).value / exact, 1.0, 1e-10);
}

TEST(Adaptive, EmptyIntervalIsZero) {
  EXPECT_EQ(integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0, 1e-10).value, 0.0);
}

TEST(Scheme, IntegratesPowerWeightedMonomials) {
  // g = a^(3 - mu) against a^mu over (0, 1] x [-2, 2]; every band sees a cubic
  for (MeasureTag tag : {MeasureTag::Zero, MeasureTag::MinusThreeHalves, MeasureTag::MinusThree}) {
    const ScaleShearScheme s = build_scale_shear_scheme(8, 4, 25, tag);
    const double mu = measure_exponent(tag);
    EXPECT_NEAR(s.apply([&](double a, double) { return std::pow(a, 3.0 - mu); }), 1.0, 1e-13);
  }
  // a^4 is not a polynomial in every band for mu = -3/2, but close
  const ScaleShearScheme s = build_scale_shear_scheme(8, 4, 25, MeasureTag::MinusThreeHalves);
  EXPECT_NEAR(s.apply([](double a, double) { return std::pow(a, 4); }), 4.0 / 3.5, 1e-8);
}

TEST(Scheme, ShearRuleIntegratesSmoothFunctions) {
  const ScaleShearScheme s = build_scale_shear_scheme(1, 2, 25, MeasureTag::Zero);
  const double got = s.apply([](double, double t) { return std::cos(t); });
  EXPECT_NEAR(got, 2.0 * std::sin(2.0), 1e-13);
}

TEST(Scheme, NodeLayoutAndBands) {
  const ScaleShearScheme s = build_scale_shear_scheme(3, 4, 15, MeasureTag::MinusThree);
  EXPECT_EQ(s.scales.size(), 16u);  // 3 dyadic bands + inner band
  EXPECT_EQ(s.shears.size(), 15u);
  EXPECT_EQ(s.size(), 240u);
  for (std::size_t j = 0; j < 12; ++j) {
    const int b = s.scale_band[j];
    EXPECT_GE(s.scales[j], std::ldexp(1.0, -b - 1));
    EXPECT_LE(s.scales[j], std::ldexp(1.0, -b));
  }
  for (std::size_t j = 12; j < 16; ++j) EXPECT_LT(s.scales[j], 0.125);
  const SchemeNode n = s.node(17);
  EXPECT_EQ(n.a, s.scales[1]);
  EXPECT_EQ(n.s, s.shears[2]);
  EXPECT_DOUBLE_EQ(n.weight, s.scale_weights[1] * s.shear_weights[2]);
}

TEST(Scheme, MeasureConversionRoundTrips) {
  const ScaleShearScheme s = build_scale_shear_scheme(4, 3, 9, MeasureTag::MinusThreeHalves);
  const ScaleShearScheme back = s.with_measure(MeasureTag::MinusThree).with_measure(MeasureTag::MinusThreeHalves);
  for (std::size_t j = 0; j < s.scales.size(); ++j)
    EXPECT_NEAR(back.scale_weights[j], s.scale_weights[j], 1e-15 * s.scale_weights[j]);
}

TEST(Scheme, ZeroBandsIsEmpty) {
  const ScaleShearScheme s = build_scale_shear_scheme(0, 4, 25, MeasureTag::MinusThree);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.apply([](double, double) { return 1.0; }), 0.0);
}

TEST(Scheme, RejectsBadParameters) {
  EXPECT_THROW(build_scale_shear_scheme(2, 1, 25, MeasureTag::Zero), InvalidArgument);
  EXPECT_THROW(build_scale_shear_scheme(2, 4, 2, MeasureTag::Zero), InvalidArgument);
  EXPECT_THROW(build_scheme_with_shears(2, 4, {0.0, 2.5}, MeasureTag::Zero), InvalidArgument);
  EXPECT_THROW(parse_measure(-2.0), InvalidArgument);
  EXPECT_EQ(parse_measure(-1.5), MeasureTag::MinusThreeHalves);
}

TEST(Sinc, ValuesAndLimits) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(0.5), 2.0 / std::numbers::pi, 1e-16);
  EXPECT_NEAR(sinc(3.0), 0.0, 1e-16);
  EXPECT_NEAR(sinc(1e-9), 1.0, 1e-16);
}

TEST(SincTable, KnownTotals) {
  // int_R sinc^2 = 1, sinc^4 = 2/3, sinc^6 = 11/20, t^2 sinc^4 = 1/(2 pi^2); tables hold half lines.
  EXPECT_NEAR(sinc_table(0, 2).total(), 0.5, 1e-12);
  EXPECT_NEAR(sinc_table(0, 4).total(), 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(sinc_table(0, 6).total(), 11.0 / 40.0, 1e-13);
  EXPECT_NEAR(sinc_table(2, 4).total(), 0.25 / (std::numbers::pi * std::numbers::pi), 1e-12);
}

TEST(SincTable, SegmentsAgreeWithSimpson) {
  const SincMomentTable& t = sinc_table(2, 12);
  auto f = [](double x) { return x * x * ipow(sinc(x), 12); };
  for (auto [lo, hi] : {std::pair{0.0, 1.3}, std::pair{-2.7, 0.4}, std::pair{-5.0, -1.1}, std::pair{3.3, 300.0}}) {
    const double ref = simpson(f, lo, hi, 200000);
    EXPECT_NEAR(t.segment(lo, hi), ref, 1e-12 + 1e-9 * std::abs(ref)) << lo << " " << hi;
  }
}

TEST(SincTable, TailBeyondTableIsConsistent) {
  const SincMomentTable& t = sinc_table(0, 6);
  // the asymptotic tail at the table end must continue the tabulated values
  const double a = t.upper_half(255.9), b = t.upper_half(256.1);
  const double mid = simpson([](double x) { return ipow(sinc(x), 6); }, 255.9, 256.1, 2000);
  EXPECT_NEAR(a - b, mid, 1e-18);
  EXPECT_GT(b, 0.0);
}

TEST(SincTable, RejectsDivergentMoments) {
  EXPECT_THROW(SincMomentTable(2, 3), InvalidArgument);
}
