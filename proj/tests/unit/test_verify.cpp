#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "potlab/error.hpp"
#include "potlab/solver.hpp"
#include "potlab/verify.hpp"

using namespace potlab;

namespace {
std::shared_ptr<const Mesh2D> disk(double h) { return std::make_shared<const Mesh2D>(Mesh2D::disk({0.0, 0.0}, 1.0, h)); }
}  // namespace

TEST(Verify, ExcessOfLinearFunction) {
  // u = x on B_r(0): mean 0, avg |x| = 4 r / (3 pi).
  const auto mesh = disk(1.0 / 64);
  const auto u = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = p.x; });
  EXPECT_NEAR(excess(u, {0.0, 0.0}, 0.5), 2.0 / (3.0 * std::numbers::pi), 2e-3);
  EXPECT_NEAR(average_norm(u, {0.0, 0.0}, 0.5), 2.0 / (3.0 * std::numbers::pi), 2e-3);
}

TEST(Verify, ExcessRequiresCoverage) {
  const auto mesh = disk(1.0 / 16);
  const auto u = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = p.x; });
  EXPECT_THROW(excess(u, {0.9, 0.0}, 0.5), ValidationError);
}

TEST(Verify, CampanatoOfSquareRoot) {
  const auto mesh = disk(1.0 / 64);
  const auto u = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = std::sqrt(std::hypot(p.x, p.y)); });
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  const auto fit = campanato_fit(u, {0.0, 0.0}, radii);
  EXPECT_NEAR(fit.theta_hat, 0.5, 0.05);
  const auto flat = VectorField2D::interpolate(mesh, 1, [](Point, std::span<double> o) { o[0] = 2.0; });
  EXPECT_TRUE(campanato_fit(flat, {0.0, 0.0}, radii).exact_fit);
}

TEST(Verify, VmoProfileOfContinuousField) {
  const auto mesh = disk(1.0 / 32);
  const auto u = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = p.x * p.x + p.y; });
  const std::vector<double> radii{0.5, 0.25, 0.125, 0.0625};
  const auto prof = vmo_profile(u, {0.0, 0.0}, radii);
  EXPECT_TRUE(prof.vanishing);
  ASSERT_EQ(prof.samples.size(), 4u);
}

TEST(Verify, IterateAbsorbOnSolution) {
  // phi(r) = 1 satisfies phi(r1) <= phi(r2)/2 + A with A = 1/2.
  const auto r = iterate_absorb([](double) { return 1.0; }, 1.0, 0.5, 0.0, 1.0);
  EXPECT_TRUE(r.hypothesis_ok);
  EXPECT_TRUE(r.conclusion_holds);
  const auto bad = iterate_absorb([](double r) { return 1.0 / r; }, 1.0, 0.0, 0.0, 1.0);
  EXPECT_FALSE(bad.hypothesis_ok);
}

TEST(Verify, IterateGeometric) {
  // phi(r) = r^2 obeys the hypothesis with A = 1, alpha = 2, B = 0.
  const auto r = iterate_geometric([](double r) { return r * r; }, 1.0, 1.0, 0.0, 2.0, 0.0, 1.0, 1.5);
  EXPECT_TRUE(r.hypothesis_ok);
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_GT(r.eps0, 0.0);
}

TEST(Verify, CavalieriIdentity) {
  const std::vector<double> omega{1.0, 2.0, 0.5, 1.5};
  const std::vector<double> f{0.0, 1.0, 3.0, 1.0};
  const auto c = cavalieri_identity(omega, f, 0.25, 0.5);
  EXPECT_LT(c.relative_error(), 1e-12);
}

TEST(Verify, CaccioppoliForHarmonic) {
  const auto mesh = disk(1.0 / 32);
  const auto v = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = p.x * p.x - p.y * p.y; });
  const auto c = caccioppoli_check(YoungFunction::power_law(2.0), v, {0.0, 0.0}, 0.8, 1.0, 0.5);
  EXPECT_GT(c.lhs, 0.0);
  EXPECT_LE(c.lhs, 50.0 * c.rhs);
}

TEST(Verify, PointwiseCheckOnRadialSolution) {
  const auto mesh = disk(1.0 / 32);
  OperatorSpec spec{YoungFunction::power_law(3.0), CoefficientField::constant(1.0), 2, 1};
  const auto mu = MeasureData::atoms({{{0.0, 0.0}, {1.0}}}, 1);
  const auto res = solve_dirichlet(spec, mesh, mollify(mu, 1.0 / 16, {-1.0, -1.0}, {1.0, 1.0}), nullptr, SolveConfig{});
  const auto chk = pointwise_wolff_check(spec, res.solution(), mu, {0.0, 0.0}, 0.5);
  EXPECT_NEAR(chk.wolff, std::sqrt(1.0 / 3.0) * 2.0 * std::sqrt(0.5), 1e-8);
  EXPECT_GT(chk.value_lhs, 0.0);
  EXPECT_LE(chk.value_lhs, chk.value_rhs);
  EstimateReport rep("pw");
  record(rep, chk, 0.5, "s");
  EXPECT_EQ(rep.samples().size(), 2u);
}

TEST(Verify, ExcessDecaySequence) {
  const auto mesh = std::make_shared<const Mesh2D>(Mesh2D::graded_disk({0.0, 0.0}, 1.0, 1.0 / 16, 1e-3, 48));
  OperatorSpec spec{YoungFunction::power_law(2.0), CoefficientField::constant(1.0), 2, 1};
  const auto u = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = p.x + p.x * p.y; });
  const auto d = excess_decay_run(spec, u, MeasureData::zero(1), {0.0, 0.0}, 1.0, 0.25, 3);
  ASSERT_GE(d.sequence.values.size(), 3u);
  EXPECT_NEAR(d.decay_exponent, 1.0, 0.05);
}

TEST(Verify, SobolevPoincareFinite) {
  const auto mesh = disk(1.0 / 16);
  const auto u = VectorField2D::interpolate(mesh, 1, [](Point p, std::span<double> o) { o[0] = 1.0 - p.x * p.x - p.y * p.y; });
  const auto c = sobolev_poincare_check(YoungFunction::power_law(2.0), u);
  EXPECT_GT(c.lhs, 0.0);
  EXPECT_GT(c.rhs, 0.0);
}
