#pragma once

#include <cstdint>
#include <span>

#include "potlab/measure.hpp"
#include "potlab/young.hpp"

namespace potlab {

/// A(x, xi) = a(x) g(|xi|)/|xi| xi for xi in R^{n x m}, stored as xi[2 c + d].
struct OperatorSpec {
  YoungFunction G;
  CoefficientField a;
  int n = 2;
  int m = 1;

  int size() const noexcept { return n * m; }
};

double frobenius_norm(std::span<const double> xi);
double frobenius_dot(std::span<const double> a, std::span<const double> b);

/// g(t)/t with the continuous extension 0 at t = 0.
double diffusivity(const YoungFunction& G, double t);

void apply_A(const OperatorSpec& spec, Point x, std::span<const double> xi, std::span<double> out);
/// V(xi) = (g(|xi|)/|xi|)^{1/2} xi.
void apply_V(const OperatorSpec& spec, std::span<const double> xi, std::span<double> out);

/// min{1, k/|xi|} xi.
void truncate(std::span<const double> xi, double k, std::span<double> out);
/// Row-major m x m Jacobian of truncate at xi.
void truncate_jacobian(std::span<const double> xi, double k, std::span<double> out);

struct MonotonicityGap {
  /// (A(xi) - A(eta)) : (xi - eta)
  double lhs = 0.0;
  /// g(|xi| + |eta|) / (|xi| + |eta|) |xi - eta|^2
  double coercive = 0.0;
  /// |V(xi) - V(eta)|^2
  double v_gap = 0.0;
};

MonotonicityGap monotonicity_gap(const OperatorSpec& spec, Point x, std::span<const double> xi,
                                 std::span<const double> eta);

/// Extremes of a ratio over a sample family.
struct RatioBand {
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

struct MonotonicityBands {
  RatioBand lhs_over_coercive;
  RatioBand vgap_over_coercive;
  /// a(x) cancels; the band is governed by the growth indices of G.
  RatioBand lhs_over_vgap;
  /// g(|xi|+|eta|)|xi-eta| over G^{1/2}(|xi|+|eta|)|V(xi)-V(eta)|.
  RatioBand g_over_v;
  /// Smallest raw (A(xi) - A(eta)) : (xi - eta) seen.
  double min_lhs = 0.0;
};

/// Bands over random pairs with entries log-uniform in magnitude over
/// [1e-3, 1e3] and uniformly random directions.
MonotonicityBands sample_monotonicity(const OperatorSpec& spec, std::size_t samples, std::uint64_t seed);

}  // namespace potlab
