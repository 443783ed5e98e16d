#include "potlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace potlab {

const char* to_string(Verdict v) { return v == Verdict::bounded ? "bounded" : "growing"; }

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

void EstimateReport::add(double axis, double lhs, double rhs, std::string series) {
  double ratio = 0.0;
  if (rhs > 0.0)
    ratio = lhs / rhs;
  else if (lhs > 0.0)
    ratio = std::numeric_limits<double>::infinity();
  samples_.push_back({axis, lhs, rhs, ratio, std::move(series)});
  fitted_ = std::max(fitted_, ratio);
}

Verdict EstimateReport::verdict() const {
  std::map<std::string, std::vector<double>> series;
  for (const auto& s : samples_) series[s.series].push_back(s.ratio);
  for (const auto& [name, ratios] : series) {
    if (ratios.size() < 3) continue;
    bool monotone = true;
    for (std::size_t k = 1; k < ratios.size(); ++k)
      if (ratios[k] < ratios[k - 1] * (1.0 - 1e-12)) monotone = false;
    if (monotone && ratios.back() > ratios.front() * (1.0 + growth_tolerance_)) return Verdict::growing;
  }
  return Verdict::bounded;
}

int EstimateReport::undefined_ratios() const {
  return static_cast<int>(std::count_if(samples_.begin(), samples_.end(),
                                        [](const EstimateSample& s) { return std::isinf(s.ratio); }));
}

void EstimateReport::write_csv(std::ostream& os) const {
  os << "series,axis,lhs,rhs,ratio\n";
  for (const auto& s : samples_) {
    os << s.series << ',' << format_number(s.axis) << ',' << format_number(s.lhs) << ',' << format_number(s.rhs) << ','
       << format_number(s.ratio) << '\n';
  }
}

nlohmann::json EstimateReport::summary() const {
  nlohmann::json j;
  j["name"] = name_;
  j["fitted_constant"] = std::isfinite(fitted_) ? nlohmann::json(fitted_) : nlohmann::json("inf");
  j["verdict"] = to_string(verdict());
  j["samples"] = samples_.size();
  j["undefined_ratios"] = undefined_ratios();
  j["metadata"] = metadata_;
  return j;
}

}  // namespace potlab
