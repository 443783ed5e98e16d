#include "potlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <stdexcept>

namespace potlab::quad {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::array<GaussRule, 65> rules = [] {
    std::array<GaussRule, 65> r;
    r[1] = GaussRule{{0.0}, {2.0}};
    for (int k = 2; k <= 64; ++k) r[static_cast<std::size_t>(k)] = build_rule(k);
    return r;
  }();
  if (n < 1 || n > 64) throw std::out_of_range("gauss_legendre: order must lie in [1, 64]");
  return rules[static_cast<std::size_t>(n)];
}

double fit_decay_ratio(std::span<const double> shells, int window) {
  const std::size_t count = std::min<std::size_t>(shells.size(), static_cast<std::size_t>(window));
  if (count == 0) return 0.0;
  const std::size_t start = shells.size() - count;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t k = start; k < shells.size(); ++k) {
    // Trailing zeros mean the integrand vanishes near the origin.
    if (!(shells[k] > 0.0)) return 0.0;
    const double x = static_cast<double>(k);
    const double y = std::log2(shells[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) return 0.0;
  const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return std::exp2(slope);
}

}  // namespace potlab::quad
