#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace potlab {

struct EstimateSample {
  /// Position along the refinement axis (radius, mesh size, level, ...).
  double axis = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs; 0 when both vanish, +inf when only rhs does.
  double ratio = 0.0;
  /// Series the sample belongs to (e.g. a center or a scenario id).
  std::string series;
};

enum class Verdict { bounded, growing };

const char* to_string(Verdict v);

/// Paired samples of a one-sided inequality lhs <= C rhs with the empirical
/// constant C = max ratio.
///
/// A series is `growing` when, in insertion order, its ratios never decrease
/// and the last exceeds the first by more than the growth tolerance.
class EstimateReport {
 public:
  explicit EstimateReport(std::string name = {}, double growth_tolerance = 0.25)
      : name_(std::move(name)), growth_tolerance_(growth_tolerance) {}

  void add(double axis, double lhs, double rhs, std::string series = {});

  const std::string& name() const noexcept { return name_; }
  const std::vector<EstimateSample>& samples() const noexcept { return samples_; }
  double fitted_constant() const noexcept { return fitted_; }
  Verdict verdict() const;
  /// Number of samples whose rhs vanished while lhs did not.
  int undefined_ratios() const;

  nlohmann::json& metadata() noexcept { return metadata_; }
  const nlohmann::json& metadata() const noexcept { return metadata_; }

  /// Header "series,axis,lhs,rhs,ratio"; numbers `%.12e`.
  void write_csv(std::ostream& os) const;
  /// {name, fitted_constant, verdict, samples, metadata}.
  nlohmann::json summary() const;

 private:
  std::string name_;
  double growth_tolerance_;
  std::vector<EstimateSample> samples_;
  double fitted_ = 0.0;
  nlohmann::json metadata_ = nlohmann::json::object();
};

/// `%.12e` formatting shared by every CSV writer.
std::string format_number(double x);

}  // namespace potlab
