#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "potlab/error.hpp"
#include "potlab/measure.hpp"
#include "potlab/quadrature.hpp"
#include "potlab/young.hpp"

using namespace potlab;
using nlohmann::json;

TEST(Measure, AtomBallMassIsClosed) {
  const auto mu = MeasureData::atoms({{{0.5, 0.0}, {3.0, 4.0}}}, 2);
  EXPECT_DOUBLE_EQ(mu.ball_mass({0.0, 0.0}, 0.5), 5.0);
  EXPECT_DOUBLE_EQ(mu.ball_mass({0.0, 0.0}, 0.49), 0.0);
  EXPECT_DOUBLE_EQ(mu.total_variation(), 5.0);
  EXPECT_EQ(mu.total(), (std::vector<double>{3.0, 4.0}));
}

TEST(Measure, UniformDiskBallMass) {
  const auto mu = MeasureData::from_json(
      {{"kind", "uniform_disk"}, {"center", {0.0, 0.0}}, {"radius", 1.0}, {"mass", 2.0}});
  EXPECT_NEAR(mu.ball_mass({0.0, 0.0}, 0.5), 0.5, 1e-12);
  EXPECT_NEAR(mu.total_variation(), 2.0, 1e-12);
}

TEST(Measure, RadialPowerBallMass) {
  // |x|^{-1} on the unit disk: mass of B_r(0) is 2 pi r.
  const auto mu = MeasureData::from_json(
      {{"kind", "radial"}, {"center", {0.0, 0.0}}, {"exponent", 1.0}, {"support", 1.0}});
  EXPECT_NEAR(mu.ball_mass({0.0, 0.0}, 0.25), 2 * std::numbers::pi * 0.25, 1e-10);
  // Off-centre ball fully inside the support, against polar integration.
  const Point c{0.3, 0.1};
  const double r = 0.2;
  const double brute = quad::integrate(
      [&](double th) {
        return quad::integrate(
            [&](double s) {
              const Point p{c.x + s * std::cos(th), c.y + s * std::sin(th)};
              return s / std::hypot(p.x, p.y);
            },
            0.0, r, 32);
      },
      0.0, 2 * std::numbers::pi, 64);
  EXPECT_NEAR(mu.ball_mass(c, r), brute, 1e-4 * brute);
}

TEST(Measure, GridBallMass) {
  GridDensity g;
  g.grid = {{-1.0, -1.0}, {1.0, 1.0}, 100, 100};
  g.values.assign(100 * 100, 1.0);
  const auto mu = MeasureData::grid(g);
  EXPECT_NEAR(mu.ball_mass({0.0, 0.0}, 0.5), std::numbers::pi * 0.25, 5e-3);
  EXPECT_NEAR(mu.total_variation(), 4.0, 1e-12);
}

TEST(Measure, GridCsvRoundTrip) {
  GridDensity g;
  g.grid = {{0.0, 0.0}, {1.0, 2.0}, 3, 2};
  g.components = 2;
  for (int k = 0; k < 12; ++k) g.values.push_back(0.25 * k);
  std::stringstream ss;
  write_grid_csv(ss, g);
  const auto back = read_grid_csv(ss);
  EXPECT_EQ(back.grid.nx, 3);
  EXPECT_EQ(back.components, 2);
  EXPECT_EQ(back.values, g.values);
}

TEST(Measure, ValidationErrorsNameFields) {
  try {
    MeasureData::from_json({{"kind", "radial"}, {"center", {0.0, 0.0}}, {"exponent", 2.0}, {"support", 1.0}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "exponent");
  }
  EXPECT_THROW(MeasureData::from_json({{"kind", "comet"}}), ValidationError);
}

TEST(Measure, MollifierNormalised) {
  const double mass = quad::integrate(
      [](double r) { return 2 * std::numbers::pi * r * mollifier_kernel(r); }, 0.0, 1.0, 64);
  EXPECT_NEAR(mass, 1.0, 1e-6);
  EXPECT_NEAR(mollifier_peak(), mollifier_kernel(0.0), 1e-15);
}

TEST(Measure, MollifyPreservesMass) {
  const auto mu = MeasureData::atoms({{{0.1, -0.2}, {2.0}}}, 1);
  const auto m = mollify(mu, 0.2, {-1.0, -1.0}, {1.0, 1.0});
  EXPECT_NEAR(m.total()[0], 2.0, 1e-12);
  EXPECT_NEAR(m.ball_mass({0.1, -0.2}, 0.21), 2.0, 1e-9);
  EXPECT_THROW(mollify(mu, 3.0, {-1.0, -1.0}, {1.0, 1.0}), ValidationError);
}

TEST(Measure, MorreyRatiosForDirac) {
  // |delta|(B_r) / (r g(r^{-1/2})) = 1/3 for g(t) = 3 t^2.
  const auto mu = MeasureData::atoms({{{0.0, 0.0}, {1.0}}}, 1);
  const std::vector<double> radii{0.5, 0.25, 0.125};
  const Point centers[] = {{0.0, 0.0}};
  const auto rep = check_morrey(mu, YoungFunction::power_law(3.0), 0.5, radii, centers);
  EXPECT_NEAR(rep.fitted_constant(), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(rep.verdict(), Verdict::bounded);
}

TEST(Coefficient, FamiliesAndBounds) {
  const auto a = CoefficientField::cosine(2.0, 0.5, 3.0);
  EXPECT_GE(a.lower(), 1.5 - 1e-12);
  EXPECT_LE(a.upper(), 2.5 + 1e-12);
  const auto h = CoefficientField::holder(1.0, 0.5, 0.5, {0.0, 0.0});
  EXPECT_NEAR(h({0.25, 0.0}), 1.25, 1e-12);
  EXPECT_NEAR(h.modulus(0.04), 0.1, 1e-12);
  EXPECT_TRUE(CoefficientField::from_json(json(2.0)).is_constant());
  EXPECT_THROW(CoefficientField::cosine(0.1, 0.5, 1.0), ValidationError);
}
