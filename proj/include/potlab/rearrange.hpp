#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace potlab {

/// Optional singular leading piece f*(t) = coefficient * t^{-exponent} on
/// [0, length), used for analytic profiles such as radial power densities.
struct SingularHead {
  double coefficient = 0.0;
  double exponent = 0.0;  // in [0, 1) so that f* stays integrable
  double length = 0.0;
};

/// Decreasing rearrangement f* as a right-continuous step function.
///
/// Step i carries the value values[i] on [breakpoints[i], breakpoints[i+1]),
/// with breakpoints[0] equal to the head length (0 without a head) and the
/// final breakpoint equal to total_measure. Beyond total_measure f* vanishes.
class RearrangementProfile {
 public:
  RearrangementProfile() = default;
  RearrangementProfile(std::vector<double> breakpoints, std::vector<double> values,
                       std::optional<SingularHead> head = std::nullopt);

  /// Profile of c * t^{-a} on [0, length), exact (no steps).
  static RearrangementProfile power_head(double coefficient, double exponent, double length);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::optional<SingularHead>& head() const noexcept { return head_; }
  double total_measure() const noexcept { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }

  /// f*(t).
  double value(double t) const;
  /// int_0^t f*(s) ds.
  double cumulative(double t) const;
  /// f**(t) = cumulative(t) / t, with f**(0) = f*(0).
  double maximal(double t) const;
  /// int_0^inf f*.
  double integral() const { return cumulative(total_measure()); }

  /// Rows (t, f*(t), f**(t)) at every breakpoint, `%.12e` formatted.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> prefix_;  // cumulative at each breakpoint
  std::optional<SingularHead> head_;
};

/// Sorts nonnegative cell values in decreasing order and accumulates the cell
/// volumes. Equal values are merged into one step.
RearrangementProfile decreasing_rearrangement(std::span<const double> values, std::span<const double> volumes);

/// f**(t).
double maximal_rearrangement(const RearrangementProfile& profile, double t);

struct LorentzSpec {
  double alpha;
  double beta;
};

struct LorentzResult {
  double value = 0.0;
  bool divergent = false;
};

/// int_0^inf (t^{1/alpha} f**(t))^beta dt/t. For t past the support f** equals
/// (int f*)/t; divergence is reported as a value, not an error.
LorentzResult lorentz_integral(const RearrangementProfile& profile, const LorentzSpec& spec);

/// sup over breakpoints s of f**(s) / gauge(s), where gauge(s) plays the role
/// of psi^{-1}(1/s).
double marcinkiewicz_gauge(const RearrangementProfile& profile, const std::function<double(double)>& gauge);

}  // namespace potlab
