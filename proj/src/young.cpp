#include "potlab/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "potlab/error.hpp"
#include "potlab/json_fields.hpp"
#include "potlab/quadrature.hpp"

namespace potlab {

namespace {

constexpr double kIndexGridMin = 1e-8;
constexpr double kIndexGridMax = 1e8;
constexpr std::size_t kIndexGridPoints = 10001;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

// Shape-preserving cubic Hermite interpolant of log g against log t, plus the
// cumulative integral of g at every node.
struct YoungFunction::Table {
  std::vector<double> log_t;
  std::vector<double> log_g;
  std::vector<double> slope;
  std::vector<double> cumulative;
  double head;  // integral of g over [0, t_min] under a power-law extension

  std::size_t interval(double lt) const {
    auto it = std::upper_bound(log_t.begin(), log_t.end(), lt);
    std::size_t i = it == log_t.begin() ? 0 : static_cast<std::size_t>(it - log_t.begin()) - 1;
    return std::min(i, log_t.size() - 2);
  }

  // Returns (log g, d log g / d log t) at log t.
  std::pair<double, double> eval(double lt) const {
    const std::size_t i = interval(lt);
    const double h = log_t[i + 1] - log_t[i];
    const double s = (lt - log_t[i]) / h;
    const double y0 = log_g[i], y1 = log_g[i + 1];
    const double m0 = slope[i] * h, m1 = slope[i + 1] * h;
    const double s2 = s * s, s3 = s2 * s;
    const double val = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
    const double der = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) / h;
    return {val, der};
  }

  double derivative(double t) const { return std::exp(eval(std::log(t)).first); }

  double value(double t) const {
    const double lt = std::log(t);
    const std::size_t i = interval(lt);
    const double t0 = std::exp(log_t[i]);
    return head + cumulative[i] + quad::integrate([this](double r) { return derivative(r); }, t0, t, 12);
  }
};

YoungFunction::YoungFunction(Family family) : family_(std::move(family)) {}

YoungFunction YoungFunction::power_law(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw ValidationError("power-law exponent must be finite and >= 2", "p");
  YoungFunction f(PowerLaw{p});
  f.finalize();
  return f;
}

YoungFunction YoungFunction::zygmund(double p, double alpha) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw ValidationError("Zygmund exponent must be finite and >= 2", "p");
  if (!std::isfinite(alpha)) throw ValidationError("Zygmund log power must be finite", "alpha");
  YoungFunction f(Zygmund{p, alpha});
  f.finalize();
  return f;
}

YoungFunction YoungFunction::scaled(const YoungFunction& base, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ValidationError("scale factor must be positive", "factor");
  YoungFunction f(Scaled{std::make_shared<const YoungFunction>(base), factor});
  f.finalize();
  return f;
}

YoungFunction YoungFunction::tabulated(double t_min, double t_max, std::vector<double> samples) {
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
    throw ValidationError("tabulated range requires 0 < t_min < t_max < inf", "t_min");
  if (samples.size() < 3) throw ValidationError("at least three derivative samples are required", "derivative");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i] > 0.0)) throw ValidationError("derivative samples must be positive", "derivative");
    if (i > 0 && !(samples[i] > samples[i - 1]))
      throw ValidationError("derivative samples must be strictly increasing", "derivative");
  }
  YoungFunction f(Tabulated{t_min, t_max, std::move(samples)});
  f.finalize();
  return f;
}

void YoungFunction::finalize() {
  if (auto* tab = std::get_if<Tabulated>(&family_)) {
    auto table = std::make_shared<Table>();
    const std::size_t n = tab->derivative_samples.size();
    const double l0 = std::log(tab->t_min), l1 = std::log(tab->t_max);
    for (std::size_t i = 0; i < n; ++i) {
      table->log_t.push_back(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
      table->log_g.push_back(std::log(tab->derivative_samples[i]));
    }
    // Fritsch-Carlson slopes.
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      delta[i] = (table->log_g[i + 1] - table->log_g[i]) / (table->log_t[i + 1] - table->log_t[i]);
    table->slope.assign(n, 0.0);
    table->slope[0] = delta[0];
    table->slope[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2 * (table->log_t[i + 1] - table->log_t[i]) + (table->log_t[i] - table->log_t[i - 1]);
      const double w2 = (table->log_t[i + 1] - table->log_t[i]) + 2 * (table->log_t[i] - table->log_t[i - 1]);
      table->slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    // g ~ c t^q below t_min, so the head integral is g(t_min) t_min / (q + 1).
    table->head = tab->derivative_samples.front() * tab->t_min / (delta[0] + 1.0);
    table->cumulative.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = std::exp(table->log_t[i]), b = std::exp(table->log_t[i + 1]);
      table->cumulative[i + 1] =
          table->cumulative[i] + quad::integrate([&](double r) { return table->derivative(r); }, a, b, 12);
    }
    table_ = std::move(table);
  }

  if (auto* pw = std::get_if<PowerLaw>(&family_)) {
    indices_ = GrowthIndices{pw->p, pw->p, 0, 0.0, std::numeric_limits<double>::infinity(), true};
    return;
  }
  if (auto* sc = std::get_if<Scaled>(&family_)) {
    indices_ = sc->base->indices();
    return;
  }

  const double lo = std::max(kIndexGridMin, domain_min());
  const double hi = std::min(kIndexGridMax, domain_max());
  GrowthIndices idx;
  idx.lower = std::numeric_limits<double>::infinity();
  idx.upper = 0.0;
  idx.grid_points = kIndexGridPoints;
  idx.grid_min = lo;
  idx.grid_max = hi;
  double previous_g = 0.0;
  for (std::size_t k = 0; k < kIndexGridPoints; ++k) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(kIndexGridPoints - 1));
    const double gt = derivative(t);
    if (!(gt > previous_g)) throw ValidationError("derivative is not strictly increasing on the sampling grid", "family");
    previous_g = gt;
    const double ratio = t * gt / value(t);
    idx.lower = std::min(idx.lower, ratio);
    idx.upper = std::max(idx.upper, ratio);
  }
  if (!std::isfinite(idx.upper)) throw ValidationError("upper growth index is not finite", "family");
  if (idx.lower < 2.0 - 1e-9) {
    std::ostringstream msg;
    msg << "lower growth index " << idx.lower << " is below 2";
    throw ValidationError(msg.str(), "family");
  }
  indices_ = idx;
}

double YoungFunction::domain_min() const noexcept {
  if (auto* tab = std::get_if<Tabulated>(&family_)) return tab->t_min;
  if (auto* sc = std::get_if<Scaled>(&family_)) return sc->base->domain_min();
  return 0.0;
}

double YoungFunction::domain_max() const noexcept {
  if (auto* tab = std::get_if<Tabulated>(&family_)) return tab->t_max;
  if (auto* sc = std::get_if<Scaled>(&family_)) return sc->base->domain_max();
  return std::numeric_limits<double>::infinity();
}

namespace {

void check_argument(double t, double lo, double hi) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("argument must be finite and nonnegative");
  if (t == 0.0) return;
  if (t < lo * (1 - 1e-12) || t > hi * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "argument " << t << " outside tabulated range [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
}

}  // namespace

double YoungFunction::value(double t) const {
  check_argument(t, domain_min(), domain_max());
  if (t == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [t](const PowerLaw& f) { return std::pow(t, f.p); },
                        [t](const Zygmund& f) { return std::pow(t, f.p) * std::pow(std::log(std::numbers::e + t), f.alpha); },
                        [t](const Scaled& f) { return f.factor * f.base->value(t); },
                        [this, t](const Tabulated& f) {
                          return table_->value(std::clamp(t, f.t_min, f.t_max));
                        },
                    },
                    family_);
}

double YoungFunction::derivative(double t) const {
  check_argument(t, domain_min(), domain_max());
  if (t == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [t](const PowerLaw& f) { return f.p * std::pow(t, f.p - 1.0); },
                        [t](const Zygmund& f) {
                          const double L = std::log(std::numbers::e + t);
                          return std::pow(t, f.p - 1.0) * std::pow(L, f.alpha - 1.0) *
                                 (f.p * L + f.alpha * t / (std::numbers::e + t));
                        },
                        [t](const Scaled& f) { return f.factor * f.base->derivative(t); },
                        [this, t](const Tabulated& f) {
                          return table_->derivative(std::clamp(t, f.t_min, f.t_max));
                        },
                    },
                    family_);
}

double YoungFunction::second_derivative(double t) const {
  check_argument(t, domain_min(), domain_max());
  return std::visit(Overloaded{
                        [t](const PowerLaw& f) {
                          if (t == 0.0) return f.p == 2.0 ? 2.0 : 0.0;
                          return f.p * (f.p - 1.0) * std::pow(t, f.p - 2.0);
                        },
                        [t](const Zygmund& f) {
                          if (t == 0.0) return f.p == 2.0 ? 2.0 : 0.0;
                          // G = exp(phi), phi = p log t + alpha log L.
                          const double e_t = std::numbers::e + t;
                          const double L = std::log(e_t);
                          const double G = std::pow(t, f.p) * std::pow(L, f.alpha);
                          const double d1 = f.p / t + f.alpha / (L * e_t);
                          const double d2 = -f.p / (t * t) - f.alpha * (1.0 + L) / (L * L * e_t * e_t);
                          return G * (d1 * d1 + d2);
                        },
                        [t](const Scaled& f) { return f.factor * f.base->second_derivative(t); },
                        [this, t](const Tabulated& f) {
                          const double tc = std::clamp(t, f.t_min, f.t_max);
                          const auto [lg, dlg] = table_->eval(std::log(tc));
                          return std::exp(lg) / tc * dlg;
                        },
                    },
                    family_);
}

double YoungFunction::inverse_derivative(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y)) throw RangeError("inverse_derivative: argument must be finite and nonnegative");
  if (y == 0.0) return 0.0;
  if (auto* pw = std::get_if<PowerLaw>(&family_)) return std::pow(y / pw->p, 1.0 / (pw->p - 1.0));
  if (auto* sc = std::get_if<Scaled>(&family_)) return sc->base->inverse_derivative(y / sc->factor);
  return inverse_by_bracketing(y);
}

double YoungFunction::inverse_by_bracketing(double y) const {
  const double dmin = domain_min(), dmax = domain_max();
  if (std::holds_alternative<Tabulated>(family_)) {
    if (y < derivative(dmin) * (1 - 1e-12) || y > derivative(dmax) * (1 + 1e-12)) {
      std::ostringstream msg;
      msg << "value " << y << " outside the tabulated derivative range";
      throw RangeError(msg.str());
    }
  }
  // Power envelopes around a reference point give the initial bracket.
  const double t_ref = std::isfinite(dmax) ? std::sqrt(dmin * dmax) : 1.0;
  const double y_ref = derivative(t_ref);
  const double lo_exp = std::max(indices_.lower - 1.0, 1.0);
  const double hi_exp = std::max(indices_.upper - 1.0, lo_exp);
  const double q = y / y_ref;
  double lo = t_ref * std::pow(q, q >= 1.0 ? 1.0 / hi_exp : 1.0 / lo_exp);
  double hi = t_ref * std::pow(q, q >= 1.0 ? 1.0 / lo_exp : 1.0 / hi_exp);
  lo = std::clamp(lo, dmin, dmax);
  hi = std::clamp(hi, dmin, dmax);
  for (int k = 0; k < 2000 && derivative(lo) > y; ++k) {
    if (lo <= dmin) throw RangeError("inverse_derivative: cannot bracket from below");
    lo = std::max(dmin, 0.5 * lo);
  }
  for (int k = 0; k < 2000 && derivative(hi) < y; ++k) {
    if (hi >= dmax) throw RangeError("inverse_derivative: cannot bracket from above");
    hi = std::min(dmax, 2.0 * hi);
  }
  if (derivative(lo) > y || derivative(hi) < y) throw RangeError("inverse_derivative: bracketing failed");
  for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (derivative(mid) < y ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  const double slope = second_derivative(t);
  if (slope > 0.0) t = std::clamp(t - (derivative(t) - y) / slope, lo, hi);
  return t;
}

double YoungFunction::conjugate(double s) const {
  if (!(s >= 0.0)) throw RangeError("conjugate: argument must be nonnegative");
  if (s == 0.0) return 0.0;
  const double t = inverse_derivative(s);
  return s * t - value(t);
}

std::string YoungFunction::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PowerLaw& f) { os << "t^" << f.p; },
                 [&](const Zygmund& f) { os << "t^" << f.p << " log^" << f.alpha << "(e+t)"; },
                 [&](const Scaled& f) { os << f.factor << "*(" << f.base->describe() << ")"; },
                 [&](const Tabulated& f) {
                   os << "tabulated[" << f.t_min << ", " << f.t_max << "; " << f.derivative_samples.size() << " samples]";
                 },
             },
             family_);
  return os.str();
}

nlohmann::json YoungFunction::to_json() const {
  return std::visit(Overloaded{
                        [](const PowerLaw& f) { return nlohmann::json{{"family", "power"}, {"p", f.p}}; },
                        [](const Zygmund& f) {
                          return nlohmann::json{{"family", "zygmund"}, {"p", f.p}, {"alpha", f.alpha}};
                        },
                        [](const Scaled& f) {
                          return nlohmann::json{{"family", "scaled"}, {"factor", f.factor}, {"base", f.base->to_json()}};
                        },
                        [](const Tabulated& f) {
                          return nlohmann::json{{"family", "tabulated"},
                                                {"t_min", f.t_min},
                                                {"t_max", f.t_max},
                                                {"derivative", f.derivative_samples}};
                        },
                    },
                    family_);
}

YoungFunction YoungFunction::from_json(const nlohmann::json& d) {
  namespace jf = json_fields;
  const std::string family = jf::string(d, "family");
  if (family == "power") return power_law(jf::number(d, "p"));
  if (family == "zygmund") return zygmund(jf::number(d, "p"), jf::number(d, "alpha"));
  if (family == "scaled") {
    const YoungFunction base = jf::nested(d, "base", [](const nlohmann::json& b) { return from_json(b); });
    return scaled(base, jf::number(d, "factor"));
  }
  if (family == "tabulated")
    return tabulated(jf::number(d, "t_min"), jf::number(d, "t_max"), jf::numbers(d, "derivative"));
  throw ValidationError("unknown family '" + family + "'", "family");
}

double young_residual(const YoungFunction& G, double t, double s) {
  return G.value(t) + G.conjugate(s) - t * s;
}

double double_conjugate(const YoungFunction& G, double t) {
  if (t == 0.0) return 0.0;
  auto objective = [&](double s) { return t * s - G.conjugate(s); };
  // Bracket the maximiser of the concave objective within [s/2, 2s].
  double s = 1.0;
  if (objective(2.0 * s) > objective(s)) {
    while (objective(2.0 * s) > objective(s) && s < 1e300) s *= 2.0;
  } else {
    while (objective(0.5 * s) >= objective(s) && s > 1e-300) s *= 0.5;
  }
  double a = 0.5 * s, b = 2.0 * s;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a), fc = objective(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a), fd = objective(d);
    }
  }
  return std::max(fc, fd);
}

EquivalenceRatios equivalence_ratios(const YoungFunction& G, double t) {
  if (!(t > 0.0)) throw DomainError("equivalence_ratios: t must be positive");
  const double Gt = G.value(t);
  const double gt = G.derivative(t);
  // conjugate(g(t)) = t g(t) - G(t) exactly, evaluated through the inversion.
  return EquivalenceRatios{t * gt / Gt, G.conjugate(gt) / Gt};
}

std::pair<double, double> HsScale::admissible_range(const YoungFunction& G, int dimension, double gamma) {
  const auto& idx = G.indices();
  const double n = static_cast<double>(dimension);
  if (gamma <= 0.0) gamma = 1.0 / (2.0 * idx.upper * n);
  if (!(gamma < 1.0 / (idx.upper * n))) throw ParameterError("gamma must lie in (0, 1/(s_G n))");
  const double lower = std::max(2.0 - idx.lower, 0.0);
  const double upper = (idx.lower - gamma * idx.upper * n) / (idx.lower + idx.upper * n);
  return {lower, upper};
}

HsScale::HsScale(YoungFunction parent, double s, int dimension, double gamma)
    : parent_(std::move(parent)), s_(s), dimension_(dimension), gamma_(gamma) {
  if (dimension_ < 1) throw ParameterError("dimension must be positive");
  if (gamma_ <= 0.0) gamma_ = 1.0 / (2.0 * parent_.indices().upper * dimension_);
  const auto [lo, hi] = admissible_range(parent_, dimension_, gamma_);
  if (!(s_ > lo && s_ < hi)) {
    std::ostringstream msg;
    msg << "exponent s = " << s_ << " outside the admissible range max{2 - i_G, 0} < s < s_m = (" << lo << ", " << hi
        << ")";
    throw ParameterError(msg.str());
  }
}

double HsScale::comparison(double t) const {
  if (t == 0.0) return 0.0;
  return std::pow(parent_.derivative(t), 1.0 - s_) * std::pow(parent_.value(t), s_);
}

double HsScale::derivative(double t) const {
  if (t == 0.0) return 0.0;
  return comparison(t) / t;
}

double HsScale::value(double t) const {
  if (!(t >= 0.0)) throw DomainError("H_s: argument must be nonnegative");
  if (t == 0.0) return 0.0;
  quad::DyadicOptions opt;
  opt.levels = 60;
  opt.nodes = 12;
  if (parent_.domain_min() > 0.0) {
    const int available = static_cast<int>(std::floor(std::log2(t / parent_.domain_min())));
    if (available < 3) throw DomainError("H_s: argument too close to the lower end of the tabulated range");
    opt.levels = std::min(opt.levels, available);
  }
  return quad::dyadic_integral([this](double r) { return derivative(r); }, t, opt).value;
}

}  // namespace potlab
