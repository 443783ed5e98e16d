#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace potlab {

class YoungFunction;

/// t^p
struct PowerLaw {
  double p;
};

/// t^p log^alpha(e + t)
struct Zygmund {
  double p;
  double alpha;
};

/// factor * base(t)
struct Scaled {
  std::shared_ptr<const YoungFunction> base;
  double factor;
};

/// Samples of the derivative on a log-spaced grid over [t_min, t_max],
/// interpolated shape-preservingly in log-log coordinates.
struct Tabulated {
  double t_min;
  double t_max;
  std::vector<double> derivative_samples;
};

/// Sampled growth indices: inf and sup of t G'(t) / G(t).
struct GrowthIndices {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t grid_points = 0;
  double grid_min = 0.0;
  double grid_max = 0.0;
  bool closed_form = false;
};

/// An N-function of Orlicz growth with lower growth index at least 2.
///
/// Instances are immutable. Index sampling and, for tabulated families, the
/// cumulative integral table are computed eagerly by the factories, which also
/// reject descriptors violating convexity, strict monotonicity of the
/// derivative, or the superquadratic lower index.
class YoungFunction {
 public:
  using Family = std::variant<PowerLaw, Zygmund, Scaled, Tabulated>;

  static YoungFunction power_law(double p);
  static YoungFunction zygmund(double p, double alpha);
  static YoungFunction scaled(const YoungFunction& base, double factor);
  static YoungFunction tabulated(double t_min, double t_max, std::vector<double> derivative_samples);

  /// Descriptor: {"family": "power"|"zygmund"|"scaled"|"tabulated", ...}.
  static YoungFunction from_json(const nlohmann::json& descriptor);
  nlohmann::json to_json() const;

  const Family& family() const noexcept { return family_; }
  std::string describe() const;

  /// G(t). Throws DomainError outside the represented range.
  double value(double t) const;
  /// g(t) = G'(t).
  double derivative(double t) const;
  /// g'(t).
  double second_derivative(double t) const;
  /// g^{-1}(y); throws RangeError when y cannot be bracketed.
  double inverse_derivative(double y) const;
  /// Legendre transform sup_t (s t - G(t)) evaluated at the maximiser g^{-1}(s).
  double conjugate(double s) const;

  const GrowthIndices& indices() const noexcept { return indices_; }

  /// Interval on which value/derivative are defined (t_max may be +inf).
  double domain_min() const noexcept;
  double domain_max() const noexcept;

 private:
  struct Table;

  explicit YoungFunction(Family family);
  void finalize();

  double inverse_by_bracketing(double y) const;

  Family family_;
  std::shared_ptr<const Table> table_;
  GrowthIndices indices_;
};

/// G(t) + conjugate(s) - t s; nonnegative by Young's inequality, zero at s = g(t).
double young_residual(const YoungFunction& G, double t, double s);

/// sup_s (t s - conjugate(s)) by direct numerical maximisation over s.
double double_conjugate(const YoungFunction& G, double t);

struct EquivalenceRatios {
  /// t g(t) / G(t), inside [i_G, s_G].
  double tg_over_G;
  /// conjugate(g(t)) / G(t), inside [i_G - 1, s_G - 1].
  double conjugate_over_G;
};

EquivalenceRatios equivalence_ratios(const YoungFunction& G, double t);

/// The auxiliary scale H_s(t) = int_0^t g(r)^{1-s} G(r)^s dr / r.
class HsScale {
 public:
  /// gamma <= 0 selects the default 1/(2 s_G n).
  HsScale(YoungFunction parent, double s, int dimension = 2, double gamma = -1.0);

  /// Open admissible interval (max{2 - i_G, 0}, s_m) for the exponent.
  static std::pair<double, double> admissible_range(const YoungFunction& G, int dimension, double gamma);

  double value(double t) const;
  double derivative(double t) const;
  /// g(t)^{1-s} G(t)^s, comparable to value(t).
  double comparison(double t) const;

  double exponent() const noexcept { return s_; }
  double gamma() const noexcept { return gamma_; }
  const YoungFunction& parent() const noexcept { return parent_; }

 private:
  YoungFunction parent_;
  double s_;
  int dimension_;
  double gamma_;
};

}  // namespace potlab
