#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conewave/fft.hpp"
#include "conewave/grid.hpp"

using namespace conewave;

TEST(FrequencyGrid, EvenGridSpansHalfOpenSquare) {
  const FrequencyGrid g = build_frequency_grid(8, 8, 4.0);
  EXPECT_DOUBLE_EQ(g.xi1(0), -4.0);
  EXPECT_DOUBLE_EQ(g.xi1(7), 3.0);
  EXPECT_DOUBLE_EQ(g.xi1(g.center1()), 0.0);
  EXPECT_DOUBLE_EQ(g.spacing1(), 1.0);
  EXPECT_DOUBLE_EQ(g.space_step(), 0.125);
  EXPECT_DOUBLE_EQ(g.period1(), 1.0);
}

TEST(FrequencyGrid, OddGridKeepsOriginAsSample) {
  const FrequencyGrid g = build_frequency_grid(129, 129, 64.0);
  EXPECT_EQ(g.center1(), 64u);
  EXPECT_EQ(g.xi1(64), 0.0);
  EXPECT_EQ(g.xi2(64), 0.0);
  // symmetric about the origin
  for (std::size_t i = 0; i < 129; ++i) EXPECT_DOUBLE_EQ(g.xi1(i), -g.xi1(128 - i));
}

TEST(FrequencyGrid, RebuiltGridsAgreeBitwise) {
  const FrequencyGrid a = build_frequency_grid(100, 64, 3.7), b = build_frequency_grid(100, 64, 3.7);
  EXPECT_TRUE(a == b);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(a.xi1(i), b.xi1(i));
}

TEST(FrequencyGrid, RejectsDegenerateInput) {
  EXPECT_THROW(build_frequency_grid(1, 8, 1.0), InvalidArgument);
  EXPECT_THROW(build_frequency_grid(8, 8, 0.0), InvalidArgument);
  EXPECT_THROW(build_frequency_grid(8, 8, std::nan("")), InvalidArgument);
}

TEST(FrequencyGrid, MirrorIndexReflectsThroughOrigin) {
  for (std::size_t n : {8u, 9u}) {
    const FrequencyGrid g = build_frequency_grid(n, n, 2.0);
    for (std::size_t i = 1; i < n; ++i) EXPECT_DOUBLE_EQ(g.xi1(mirror_index(i, n)), -g.xi1(i));
  }
}

namespace {

// Direct O(n^4) sum with the library's sign and scaling.
Raster<Complex> brute_forward(const FrequencyGrid& g, const Raster<Complex>& f) {
  Raster<Complex> out(g.n1(), g.n2());
  const double h = g.space_step();
  for (std::size_t k = 0; k < g.n1(); ++k)
    for (std::size_t l = 0; l < g.n2(); ++l) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
          const double ph = 2.0 * std::numbers::pi * (g.xi1(k) * g.x1(i) + g.xi2(l) * g.x2(j));
          s += f(i, j) * Complex(std::cos(ph), std::sin(ph));
        }
      out(k, l) = s * h * h;
    }
  return out;
}

}  // namespace

TEST(Fft, ForwardMatchesDirectSumOnOddAndEvenGrids) {
  for (std::size_t n : {6u, 7u}) {
    const FrequencyGrid g = build_frequency_grid(n, n + 1, 1.5);
    Raster<Complex> f(n, n + 1);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = Complex(std::sin(1.0 + k), std::cos(0.3 * k));
    const Raster<Complex> a = forward_raster(g, f), b = brute_forward(g, f);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-12);
  }
}

TEST(Fft, RoundTripIsIdentity) {
  const FrequencyGrid g = build_frequency_grid(33, 32, 2.0);
  Raster<Complex> f(33, 32);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = Complex(std::cos(0.7 * k), 0.1 * k);
  const Raster<Complex> back = inverse_raster(g, forward_raster(g, f));
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(std::abs(back[k] - f[k]), 0.0, 1e-11);
}

TEST(Fft, GaussianSpectrumMatchesClosedForm) {
  // f = exp(-|x|^2 / (2 w^2)) has f^ = 2 pi w^2 exp(-2 pi^2 w^2 |xi|^2).
  const FrequencyGrid g = build_frequency_grid(128, 128, 8.0);
  const double w = 0.5;
  SpatialField f(g);
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j)
      f.values(i, j) = std::exp(-(g.x1(i) * g.x1(i) + g.x2(j) * g.x2(j)) / (2 * w * w));
  const SampledSpectrum s = forward_spectrum(f);
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < 128; i += 5)
    for (std::size_t j = 0; j < 128; j += 7) {
      const double r2 = g.xi1(i) * g.xi1(i) + g.xi2(j) * g.xi2(j);
      EXPECT_NEAR(s.values(i, j).real(), 2 * pi * w * w * std::exp(-2 * pi * pi * w * w * r2), 1e-12);
      EXPECT_NEAR(s.values(i, j).imag(), 0.0, 1e-12);
    }
}

TEST(Fft, PlancherelHolds) {
  const FrequencyGrid g = build_frequency_grid(40, 40, 3.0);
  SpatialField f(g);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = std::sin(0.37 * k) * std::exp(-1e-3 * k);
  EXPECT_NEAR(forward_spectrum(f).norm(), f.norm(), 1e-12 * f.norm());
}

TEST(Fft, InverseOfRealFieldSpectrumIsReal) {
  const FrequencyGrid g = build_frequency_grid(31, 31, 2.0);
  SpatialField f(g);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = std::cos(0.11 * k * k);
  EXPECT_LT(inverse_imaginary_ratio(forward_spectrum(f)), 1e-13);
}

TEST(Fft, NonFiniteFieldRejected) {
  const FrequencyGrid g = build_frequency_grid(8, 8, 1.0);
  SpatialField f(g);
  f.values(2, 3) = std::nan("");
  EXPECT_THROW(forward_spectrum(f), InvalidArgument);
}
