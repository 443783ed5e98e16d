#include "potlab/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "potlab/error.hpp"
#include "potlab/quadrature.hpp"

namespace potlab {

RearrangementProfile::RearrangementProfile(std::vector<double> breakpoints, std::vector<double> values,
                                           std::optional<SingularHead> head)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), head_(head) {
  if (breakpoints_.size() != values_.size() + 1)
    throw ValidationError("profile needs exactly one more breakpoint than values");
  const double start = head_ ? head_->length : 0.0;
  if (breakpoints_.front() != start) throw ValidationError("first breakpoint must equal the head length");
  if (head_) {
    if (!(head_->coefficient >= 0.0) || !(head_->exponent >= 0.0 && head_->exponent < 1.0) || !(head_->length > 0.0))
      throw ValidationError("singular head needs coefficient >= 0, exponent in [0, 1), length > 0");
  }
  double previous = head_ ? head_->coefficient * std::pow(head_->length, -head_->exponent)
                          : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(breakpoints_[i + 1] >= breakpoints_[i])) throw ValidationError("breakpoints must be nondecreasing");
    if (!(values_[i] >= 0.0)) throw ValidationError("profile values must be nonnegative");
    if (values_[i] > previous * (1 + 1e-12)) throw ValidationError("profile values must be nonincreasing");
    previous = values_[i];
  }
  prefix_.resize(breakpoints_.size());
  prefix_[0] = head_ ? head_->coefficient * std::pow(head_->length, 1.0 - head_->exponent) / (1.0 - head_->exponent)
                     : 0.0;
  long double acc = prefix_[0];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += static_cast<long double>(values_[i]) * (static_cast<long double>(breakpoints_[i + 1]) - breakpoints_[i]);
    prefix_[i + 1] = static_cast<double>(acc);
  }
}

RearrangementProfile RearrangementProfile::power_head(double coefficient, double exponent, double length) {
  return RearrangementProfile({length}, {}, SingularHead{coefficient, exponent, length});
}

double RearrangementProfile::value(double t) const {
  if (breakpoints_.empty()) return 0.0;
  t = std::max(t, 0.0);
  if (head_ && t < head_->length) {
    if (t == 0.0) return head_->exponent > 0.0 ? std::numeric_limits<double>::infinity() : head_->coefficient;
    return head_->coefficient * std::pow(t, -head_->exponent);
  }
  if (t >= total_measure()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return values_[std::min(i, values_.size() - 1)];
}

double RearrangementProfile::cumulative(double t) const {
  if (breakpoints_.empty() || t <= 0.0) return 0.0;
  if (head_ && t < head_->length)
    return head_->coefficient * std::pow(t, 1.0 - head_->exponent) / (1.0 - head_->exponent);
  if (t >= total_measure()) return prefix_.back();
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return prefix_[i] + values_[i] * (t - breakpoints_[i]);
}

double RearrangementProfile::maximal(double t) const {
  if (t <= 0.0) return value(0.0);
  return cumulative(t) / t;
}

void RearrangementProfile::write_csv(std::ostream& os) const {
  os << "t,f_star,f_star_star\n";
  char buf[128];
  for (double t : breakpoints_) {
    if (t <= 0.0) continue;
    // f* is right-continuous; report the value just before each breakpoint.
    const double left = value(std::nextafter(t, 0.0));
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e\n", t, left, maximal(t));
    os << buf;
  }
}

RearrangementProfile decreasing_rearrangement(std::span<const double> values, std::span<const double> volumes) {
  if (values.size() != volumes.size()) throw ValidationError("values and volumes differ in length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw ValidationError("rearrangement input must be finite and nonnegative", "values[" + std::to_string(i) + "]");
    if (!(volumes[i] >= 0.0) || !std::isfinite(volumes[i]))
      throw ValidationError("cell volumes must be finite and nonnegative", "volumes[" + std::to_string(i) + "]");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  std::vector<double> breaks{0.0};
  std::vector<double> steps;
  long double position = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double v = values[order[k]];
    long double width = 0.0;
    while (k < order.size() && values[order[k]] == v) width += volumes[order[k++]];
    if (width == 0.0) continue;
    position += width;
    steps.push_back(v);
    breaks.push_back(static_cast<double>(position));
  }
  return RearrangementProfile(std::move(breaks), std::move(steps));
}

double maximal_rearrangement(const RearrangementProfile& profile, double t) {
  if (t < 0.0) throw DomainError("maximal_rearrangement: t must be nonnegative");
  return profile.maximal(t);
}

LorentzResult lorentz_integral(const RearrangementProfile& profile, const LorentzSpec& spec) {
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0)) throw ParameterError("Lorentz exponents must be positive");
  const double inv_alpha = 1.0 / spec.alpha;
  const double beta = spec.beta;
  LorentzResult out;
  if (profile.breakpoints().empty() || profile.integral() == 0.0) return out;

  double sum = 0.0;
  const auto& bp = profile.breakpoints();
  const auto& vals = profile.values();
  std::size_t first_step = 0;
  if (const auto& head = profile.head()) {
    // f** = c t^{-a} / (1 - a) on the head.
    const double e = beta * (inv_alpha - head->exponent);
    if (head->coefficient > 0.0) {
      if (e <= 0.0) return LorentzResult{std::numeric_limits<double>::infinity(), true};
      sum += std::pow(head->coefficient / (1.0 - head->exponent), beta) * std::pow(head->length, e) / e;
    }
  } else if (!vals.empty()) {
    // f** is constant on the first step.
    if (vals[0] > 0.0) sum += std::pow(vals[0], beta) * std::pow(bp[1], beta * inv_alpha) / (beta * inv_alpha);
    first_step = 1;
  }
  auto integrand = [&](double t) { return std::pow(std::pow(t, inv_alpha) * profile.maximal(t), beta) / t; };
  for (std::size_t i = first_step; i < vals.size(); ++i) {
    if (bp[i + 1] > bp[i]) sum += quad::integrate_geometric(integrand, bp[i], bp[i + 1], 24, 1.25);
  }
  // Past the support f** = L / t.
  const double total = profile.integral();
  const double e_tail = beta * (inv_alpha - 1.0);
  if (e_tail >= 0.0) return LorentzResult{std::numeric_limits<double>::infinity(), true};
  sum += std::pow(total, beta) * std::pow(profile.total_measure(), e_tail) / (-e_tail);
  out.value = sum;
  return out;
}

double marcinkiewicz_gauge(const RearrangementProfile& profile, const std::function<double(double)>& gauge) {
  std::vector<double> points;
  for (double t : profile.breakpoints())
    if (t > 0.0) points.push_back(t);
  if (const auto& head = profile.head()) {
    for (int k = 1; k <= 60; ++k) points.push_back(head->length * std::exp2(-k));
  }
  double best = 0.0;
  for (double s : points) {
    const double f = profile.maximal(s);
    if (f == 0.0) continue;
    const double denom = gauge(s);
    if (!(denom > 0.0)) throw DomainError("Marcinkiewicz gauge must be positive on the profile support");
    best = std::max(best, f / denom);
  }
  return best;
}

}  // namespace potlab
