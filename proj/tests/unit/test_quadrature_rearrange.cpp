#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "potlab/quadrature.hpp"
#include "potlab/rearrange.hpp"

using namespace potlab;

TEST(Quadrature, GaussExactForPolynomials) {
  // 8 nodes integrate degree 15 exactly.
  const double v = quad::integrate([](double x) { return std::pow(x, 15) + 3 * x * x; }, 0.0, 2.0, 8);
  EXPECT_NEAR(v, std::pow(2.0, 16) / 16 + 8.0, 1e-9);
}

TEST(Quadrature, DyadicIntegralOfSingularPower) {
  // int_0^1 r^{-1/2} dr = 2
  const auto res = quad::dyadic_integral([](double r) { return 1.0 / std::sqrt(r); }, 1.0);
  EXPECT_FALSE(res.divergent);
  EXPECT_NEAR(res.value, 2.0, 1e-9);
}

TEST(Quadrature, DyadicIntegralFlagsLogDivergence) {
  const auto res = quad::dyadic_integral([](double r) { return 1.0 / r; }, 1.0);
  EXPECT_TRUE(res.divergent);
}

TEST(Rearrange, StepProfile) {
  const std::vector<double> values{1.0, 3.0, 2.0, 3.0};
  const std::vector<double> volumes{1.0, 1.0, 1.0, 1.0};
  const auto p = decreasing_rearrangement(values, volumes);
  EXPECT_DOUBLE_EQ(p.value(0.5), 3.0);
  EXPECT_DOUBLE_EQ(p.value(1.5), 3.0);
  EXPECT_DOUBLE_EQ(p.value(2.5), 2.0);
  EXPECT_DOUBLE_EQ(p.value(3.5), 1.0);
  EXPECT_DOUBLE_EQ(p.value(5.0), 0.0);
  EXPECT_DOUBLE_EQ(p.integral(), 9.0);
  EXPECT_DOUBLE_EQ(maximal_rearrangement(p, 3.0), 8.0 / 3.0);
  EXPECT_DOUBLE_EQ(maximal_rearrangement(p, 6.0), 1.5);
}

TEST(Rearrange, LorentzOfIndicator) {
  // f** = 1 on [0, 1], 1/t after: int_0^1 t^{1/2} dt/t + int_1^inf t^{-3/2} dt = 4
  const auto p = decreasing_rearrangement(std::vector<double>{1.0}, std::vector<double>{1.0});
  const auto r = lorentz_integral(p, {2.0, 1.0});
  EXPECT_FALSE(r.divergent);
  EXPECT_NEAR(r.value, 4.0, 1e-9);
}

TEST(Rearrange, LorentzDivergesForAlphaOne) {
  const auto p = decreasing_rearrangement(std::vector<double>{1.0}, std::vector<double>{1.0});
  EXPECT_TRUE(lorentz_integral(p, {1.0, 1.0}).divergent);
}

TEST(Rearrange, PowerHeadCumulative) {
  // f*(t) = t^{-1/2} on [0, 4): int_0^t = 2 sqrt(t)
  const auto p = RearrangementProfile::power_head(1.0, 0.5, 4.0);
  EXPECT_NEAR(p.cumulative(1.0), 2.0, 1e-12);
  EXPECT_NEAR(p.maximal(1.0), 2.0, 1e-12);
  EXPECT_NEAR(p.integral(), 4.0, 1e-12);
}

TEST(Rearrange, MarcinkiewiczGauge) {
  const auto p = decreasing_rearrangement(std::vector<double>{2.0}, std::vector<double>{1.0});
  // sup_s f**(s) / gauge(s) with gauge = 1 is the peak value.
  EXPECT_NEAR(marcinkiewicz_gauge(p, [](double) { return 1.0; }), 2.0, 1e-12);
}

TEST(Rearrange, CsvHasRows) {
  const auto p = decreasing_rearrangement(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 1.0});
  std::ostringstream os;
  p.write_csv(os);
  EXPECT_NE(os.str().find("e+00"), std::string::npos);
}
