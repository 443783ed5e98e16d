#include "potlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "potlab/error.hpp"

namespace potlab {

namespace {

void check_sizes(const OperatorSpec& spec, std::size_t a, std::size_t b) {
  const auto s = static_cast<std::size_t>(spec.size());
  if (a != s || b != s) throw ValidationError("tensor size does not match n * m", "xi");
}

void include(RatioBand& band, double value) {
  if (band.samples == 0) band.min = band.max = value;
  band.min = std::min(band.min, value);
  band.max = std::max(band.max, value);
  ++band.samples;
}

}  // namespace

double frobenius_norm(std::span<const double> xi) { return std::sqrt(frobenius_dot(xi, xi)); }

double frobenius_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double diffusivity(const YoungFunction& G, double t) { return t > 0.0 ? G.derivative(t) / t : 0.0; }

void apply_A(const OperatorSpec& spec, Point x, std::span<const double> xi, std::span<double> out) {
  check_sizes(spec, xi.size(), out.size());
  const double w = spec.a(x) * diffusivity(spec.G, frobenius_norm(xi));
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = w * xi[i];
}

void apply_V(const OperatorSpec& spec, std::span<const double> xi, std::span<double> out) {
  check_sizes(spec, xi.size(), out.size());
  const double w = std::sqrt(diffusivity(spec.G, frobenius_norm(xi)));
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = w * xi[i];
}

void truncate(std::span<const double> xi, double k, std::span<double> out) {
  if (!(k > 0.0)) throw DomainError("truncation level must be positive");
  if (out.size() != xi.size()) throw ValidationError("output size mismatch", "out");
  const double r = frobenius_norm(xi);
  const double w = r > k ? k / r : 1.0;
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = w * xi[i];
}

void truncate_jacobian(std::span<const double> xi, double k, std::span<double> out) {
  if (!(k > 0.0)) throw DomainError("truncation level must be positive");
  const std::size_t m = xi.size();
  if (out.size() != m * m) throw ValidationError("output size must be m * m", "out");
  const double r = frobenius_norm(xi);
  std::fill(out.begin(), out.end(), 0.0);
  if (r <= k) {
    for (std::size_t i = 0; i < m; ++i) out[i * m + i] = 1.0;
    return;
  }
  const double w = k / r;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = w * ((i == j ? 1.0 : 0.0) - xi[i] * xi[j] / (r * r));
}

MonotonicityGap monotonicity_gap(const OperatorSpec& spec, Point x, std::span<const double> xi,
                                 std::span<const double> eta) {
  check_sizes(spec, xi.size(), eta.size());
  const std::size_t s = xi.size();
  std::vector<double> a(s), b(s), va(s), vb(s);
  apply_A(spec, x, xi, a);
  apply_A(spec, x, eta, b);
  apply_V(spec, xi, va);
  apply_V(spec, eta, vb);
  MonotonicityGap out;
  double diff2 = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double d = xi[i] - eta[i];
    out.lhs += (a[i] - b[i]) * d;
    diff2 += d * d;
    out.v_gap += (va[i] - vb[i]) * (va[i] - vb[i]);
  }
  const double sum = frobenius_norm(xi) + frobenius_norm(eta);
  out.coercive = diffusivity(spec.G, sum) * diff2;
  return out;
}

MonotonicityBands sample_monotonicity(const OperatorSpec& spec, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  const auto s = static_cast<std::size_t>(spec.size());
  std::vector<double> xi(s), eta(s), vx(s), ve(s);
  auto draw = [&](std::vector<double>& v) {
    double r = 0.0;
    for (double& c : v) {
      c = normal(rng);
      r += c * c;
    }
    const double scale = std::pow(10.0, exponent(rng)) / std::sqrt(r);
    for (double& c : v) c *= scale;
  };
  MonotonicityBands bands;
  bands.min_lhs = std::numeric_limits<double>::infinity();
  const Point origin{};
  for (std::size_t k = 0; k < samples; ++k) {
    draw(xi);
    draw(eta);
    const auto gap = monotonicity_gap(spec, origin, xi, eta);
    bands.min_lhs = std::min(bands.min_lhs, gap.lhs);
    if (!(gap.coercive > 0.0)) continue;
    include(bands.lhs_over_coercive, gap.lhs / (gap.coercive * spec.a(origin)));
    include(bands.vgap_over_coercive, gap.v_gap / gap.coercive);
    if (gap.v_gap > 0.0) include(bands.lhs_over_vgap, gap.lhs / (gap.v_gap * spec.a(origin)));
    const double sum = frobenius_norm(xi) + frobenius_norm(eta);
    double diff = 0.0;
    for (std::size_t i = 0; i < s; ++i) diff += (xi[i] - eta[i]) * (xi[i] - eta[i]);
    include(bands.g_over_v, spec.G.derivative(sum) * std::sqrt(diff) /
                                (std::sqrt(spec.G.value(sum)) * std::sqrt(gap.v_gap)));
  }
  return bands;
}

}  // namespace potlab
