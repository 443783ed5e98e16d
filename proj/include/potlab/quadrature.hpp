#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace potlab::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules for 1 <= n <= 64 are built once and shared.
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate(F&& f, double a, double b, int n = 16) {
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Integral over [a, b] split geometrically away from `a`, for integrands that
/// are smooth on (a, b] but steep near `a` (a > 0 required).
template <class F>
double integrate_geometric(F&& f, double a, double b, int n = 16, double ratio = 2.0) {
  double sum = 0.0;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, lo * ratio);
    sum += integrate(f, lo, hi, n);
    lo = hi;
  }
  return sum;
}

struct DyadicOptions {
  int levels = 40;
  int nodes = 8;
  int fit_levels = 8;
  /// Shells are declared non-decaying when the fitted ratio between
  /// consecutive contributions is at least 2^-slack.
  double divergence_slack = 0.02;
  bool extrapolate_tail = true;
};

struct DyadicResult {
  double value = 0.0;
  double tail = 0.0;
  bool divergent = false;
  /// Fitted ratio c_{k+1}/c_k over the trailing shells (0 when they vanish).
  double decay_ratio = 0.0;
  /// Contribution of shell k = [upper 2^{-k-1}, upper 2^{-k}].
  std::vector<double> shells;
};

/// Least-squares ratio of consecutive positive values in the trailing window.
double fit_decay_ratio(std::span<const double> shells, int window);

/// Integral of a nonnegative integrand over (0, upper] on dyadic shells with a
/// geometric extrapolation of the remainder below the last shell.
template <class F>
DyadicResult dyadic_integral(F&& f, double upper, const DyadicOptions& opt = {}) {
  DyadicResult res;
  res.shells.reserve(static_cast<std::size_t>(opt.levels));
  double hi = upper;
  for (int k = 0; k < opt.levels; ++k) {
    const double lo = 0.5 * hi;
    res.shells.push_back(integrate(f, lo, hi, opt.nodes));
    hi = lo;
  }
  double sum = 0.0;
  for (double c : res.shells) sum += c;
  res.decay_ratio = fit_decay_ratio(res.shells, opt.fit_levels);
  res.divergent = res.decay_ratio >= std::exp2(-opt.divergence_slack);
  if (!res.divergent && opt.extrapolate_tail && res.decay_ratio > 0.0) {
    res.tail = res.shells.back() * res.decay_ratio / (1.0 - res.decay_ratio);
  }
  res.value = sum + res.tail;
  return res;
}

}  // namespace potlab::quad
