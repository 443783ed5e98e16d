#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "potlab/field.hpp"
#include "potlab/wolff.hpp"

using namespace potlab;

namespace {
MeasureData dirac() { return MeasureData::atoms({{{0.0, 0.0}, {1.0}}}, 1); }
}  // namespace

TEST(Wolff, DiracClosedForm) {
  // int_0^R (1/(p r))^{1/(p-1)} dr for G = t^p and n = 2.
  for (double p : {3.0, 4.0}) {
    const auto G = YoungFunction::power_law(p);
    const double q = 1.0 / (p - 1);
    const double exact = std::pow(1.0 / p, q) * std::pow(0.5, 1 - q) / (1 - q);
    EXPECT_NEAR(wolff_potential(G, dirac(), {0.0, 0.0}, 0.5).value, exact, 1e-9);
    EXPECT_NEAR(wolff_potential(G, [](double) { return 1.0; }, 0.5, 2).value, exact, 1e-7);
  }
}

TEST(Wolff, QuadraticDiracDiverges) {
  const auto w = wolff_potential(YoungFunction::power_law(2.0), dirac(), {0.0, 0.0}, 1.0);
  EXPECT_TRUE(w.divergent);
  EXPECT_TRUE(std::isinf(w.value));
}

TEST(Wolff, UniformDensityIsFinite) {
  // mu = Lebesgue on B_1: |mu|(B_r) = pi r^2; int_0^1 (pi r / 3)^{1/2} dr
  const auto G = YoungFunction::power_law(3.0);
  const auto mu = MeasureData::from_json(
      {{"kind", "uniform_disk"}, {"center", {0.0, 0.0}}, {"radius", 2.0}, {"mass", 4.0 * M_PI}});
  const auto w = wolff_potential(G, mu, {0.0, 0.0}, 1.0);
  EXPECT_FALSE(w.divergent);
  EXPECT_NEAR(w.value, std::sqrt(M_PI / 3.0) * 2.0 / 3.0, 1e-7);
}

TEST(Wolff, DyadicSumComparable) {
  const auto G = YoungFunction::power_law(3.0);
  const double w = wolff_potential(G, dirac(), {0.0, 0.0}, 1.0).value;
  const double s = wolff_dyadic_sum(G, dirac(), {0.0, 0.0}, 1.0);
  EXPECT_GT(s / w, 0.5);
  EXPECT_LT(s / w, 4.0);
}

TEST(Wolff, ShrinkProfileVanishesForDiracP3) {
  const auto prof = shrink_profile(YoungFunction::power_law(3.0), [](double) { return 1.0; }, 1.0, 2, 10);
  ASSERT_EQ(prof.size(), 10u);
  EXPECT_LT(prof.back().second, prof.front().second);
}

TEST(Wolff, CsvRow) {
  std::ostringstream os;
  write_wolff_csv_header(os);
  write_wolff_csv_row(os, {0.0, 0.0}, 1.0, wolff_potential(YoungFunction::power_law(3.0), dirac(), {0.0, 0.0}, 1.0));
  EXPECT_EQ(os.str().substr(0, 7), "x0,y0,R");
  EXPECT_NE(os.str().find("1.154700538379e+00"), std::string::npos);
}

TEST(Wolff, RearrangementBoundConsistent) {
  GridDensity F;
  F.grid = {{-1.0, -1.0}, {1.0, 1.0}, 16, 16};
  F.values.assign(256, 1.0);
  const auto b = rearrangement_bound(YoungFunction::power_law(3.0), F, {0.0, 0.0}, 0.5);
  EXPECT_FALSE(b.inconsistent);
  EXPECT_GT(b.ratio, 0.0);
  EXPECT_TRUE(std::isfinite(b.ratio));
}

TEST(Field, ApplyAMatchesDefinition) {
  OperatorSpec spec{YoungFunction::power_law(3.0), CoefficientField::constant(2.0), 2, 1};
  const double xi[2] = {3.0, 4.0};
  double out[2];
  apply_A(spec, {0.0, 0.0}, xi, out);
  // a g(|xi|)/|xi| xi = 2 * 75 / 5 * xi
  EXPECT_NEAR(out[0], 90.0, 1e-12);
  EXPECT_NEAR(out[1], 120.0, 1e-12);
}

TEST(Field, TruncateAndJacobian) {
  const double xi[2] = {3.0, 4.0};
  double out[2], jac[4];
  truncate(xi, 1.0, out);
  EXPECT_NEAR(std::hypot(out[0], out[1]), 1.0, 1e-15);
  truncate_jacobian(xi, 1.0, jac);
  // (I - e e^T) / |xi| with e = xi/|xi|
  EXPECT_NEAR(jac[0], (1 - 0.36) / 5, 1e-15);
  EXPECT_NEAR(jac[1], -0.48 / 5, 1e-15);
  truncate_jacobian(xi, 10.0, jac);
  EXPECT_DOUBLE_EQ(jac[0], 1.0);
  EXPECT_DOUBLE_EQ(jac[1], 0.0);
}

TEST(Field, MonotonicityGapQuadraticIsExact) {
  OperatorSpec spec{YoungFunction::power_law(2.0), CoefficientField::constant(1.0), 2, 2};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> a(4), b(4);
  for (int k = 0; k < 20; ++k) {
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng);
    const auto gap = monotonicity_gap(spec, {0.0, 0.0}, a, b);
    EXPECT_NEAR(gap.lhs, gap.v_gap, 1e-12 * gap.lhs);
  }
}

TEST(Field, BandsPositive) {
  const auto b = sample_monotonicity({YoungFunction::zygmund(2.0, 1.0), CoefficientField::constant(1.0), 2, 2}, 5000, 9);
  EXPECT_GE(b.min_lhs, 0.0);
  EXPECT_GT(b.lhs_over_vgap.min, 0.0);
  EXPECT_LT(b.lhs_over_vgap.max / b.lhs_over_vgap.min, 50.0);
  EXPECT_EQ(b.lhs_over_vgap.samples, 5000u);
}
