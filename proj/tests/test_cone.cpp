#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conewave/cone.hpp"

using namespace conewave;

namespace {

template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// p0^(xi) = int_{|e2| <= |e1|} Phi^(xi - e) de by nested Simpson.
double p0_oracle(const BumpDescriptor& b, double x1, double x2) {
  const double W = 10.0 / b.sigma;  // g decays like |x|^-2k; the cut tail is below 1e-12
  auto row = [&](double e1) {
    const double r = std::abs(e1);
    if (r == 0.0) return 0.0;
    return b.factor(x1 - e1) * simpson([&](double e2) { return b.factor(x2 - e2); }, -r, r, 2 * static_cast<int>(r * 100) + 40);
  };
  // |e1| has a kink at 0
  return simpson(row, x1 - W, 0.0, 8000) + simpson(row, 0.0, x1 + W, 8000);
}

}  // namespace

TEST(Bump, PresetRadiiAndPeak) {
  const BumpDescriptor b4 = make_bump(default_bump_order(2), 2), b5 = make_bump(default_bump_order(4), 4);
  EXPECT_EQ(b4.k, 4);
  EXPECT_EQ(b5.k, 5);
  EXPECT_DOUBLE_EQ(b4.sigma, 0.25);
  EXPECT_NEAR(b4.support_radius(), 1.414, 1e-3);
  EXPECT_NEAR(b5.support_radius(), 1.768, 1e-3);
  EXPECT_LE(b4.peak(), 1.0);
  EXPECT_LE(b5.peak(), 1.0);
}

TEST(Bump, FactorHasUnitMass) {
  const BumpDescriptor b = make_bump(4, 2);
  const double m = simpson([&](double x) { return b.factor(x); }, -400.0, 400.0, 400000);
  EXPECT_NEAR(m, 1.0, 1e-9);
  EXPECT_NEAR(b.mass_outside_square(0.0), 1.0, 1e-14);
}

TEST(Bump, InsufficientSmoothnessRejected) {
  EXPECT_THROW(make_bump(1, 4), ConstraintViolation);
  EXPECT_THROW(make_bump(0, 0), InvalidArgument);
}

TEST(ConeProjector, MatchesDirectConvolution) {
  const BumpDescriptor b = make_bump(4, 2);
  const ConeProjector proj(b);
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{1.5, 0.5}, std::pair{0.7, 3.0}, std::pair{-2.0, 5.0}}) {
    const double want = p0_oracle(b, x, y);
    EXPECT_NEAR(proj.p0(x, y), want, 1e-9) << x << "," << y;
  }
}

TEST(ConeProjector, PartitionAndSymmetry) {
  const ConeProjector proj(make_bump(5, 4));
  for (auto [x, y] : {std::pair{0.3, 0.1}, std::pair{4.0, -9.0}, std::pair{-30.0, 29.0}}) {
    EXPECT_NEAR(proj.p0(x, y) + proj.p1(x, y), 1.0, 1e-15);
    EXPECT_NEAR(proj.p0(x, y), proj.p1(y, x), 1e-15);
    EXPECT_NEAR(proj.p0(x, y), proj.p0(-x, y), 1e-15);
    EXPECT_GE(proj.p0(x, y), 0.0);
  }
  EXPECT_NEAR(proj.p0(0.0, 0.0), 0.5, 1e-11);  // sinc table accuracy
  EXPECT_NEAR(proj.p0(1000.0, 0.0), 1.0, 1e-12);
}

TEST(ConeProjector, OffConeDecayForPresets) {
  for (int N : {2, 4}) {
    const BumpDescriptor b = make_bump(default_bump_order(N), N);
    const DecayReport r0 = verify_projection_decay(ConeProjector(b), N, 0);
    const DecayReport r1 = verify_projection_decay(ConeProjector(b), N, 1);
    EXPECT_TRUE(r0.passed);
    EXPECT_TRUE(r1.passed);
  }
}

TEST(ConeProjector, LowOrderBumpStillDecaysAlongVerticalAxis) {
  const DecayReport r = verify_projection_decay(ConeProjector(make_bump(2, 2)), 2, 0, 4, 10, {{0, 1}});
  ASSERT_EQ(r.rays.size(), 1u);
  EXPECT_LE(r.rays[0].slope, -1.75);
}

TEST(ConeProjection, GridSamplesAndRoots) {
  const FrequencyGrid g = build_frequency_grid(33, 33, 16.0);
  const BumpDescriptor b = make_bump(4, 2);
  const ConeProjectionSet set = compute_cone_projection(b, g);
  const ConeProjector proj(b);
  for (std::size_t i = 0; i < 33; i += 4)
    for (std::size_t j = 0; j < 33; j += 3) {
      EXPECT_DOUBLE_EQ(set.p0(i, j), proj.p0(g.xi1(i), g.xi2(j)));
      EXPECT_NEAR(set.q0(i, j) * set.q0(i, j), set.p0(i, j), 1e-15);
      EXPECT_NEAR(set.q1(i, j) * set.q1(i, j), set.p1(i, j), 1e-15);
    }
}

TEST(ConeProjection, SmallGridFailsTailPrecondition) {
  const FrequencyGrid g = build_frequency_grid(17, 17, 2.0);
  EXPECT_THROW(compute_cone_projection(make_bump(4, 2), g), PreconditionError);
  EXPECT_NO_THROW(compute_cone_projection(make_bump(4, 2), g, 1.0));
}
