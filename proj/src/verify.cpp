#include "potlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "potlab/error.hpp"
#include "potlab/quadrature.hpp"
#include "potlab/wolff.hpp"

namespace potlab {

namespace {

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

BallQuadrature covering_quadrature(const VectorField2D& u, Point x0, double r) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  auto q = BallQuadrature::build(u.mesh(), x0, r);
  if (q.covered_area < 0.95 * std::numbers::pi * r * r)
    throw ValidationError("ball is not covered by the mesh", "ball");
  return q;
}

// Slope and intercept of y against x by least squares, with RMS residual.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace

double excess(const VectorField2D& u, Point x0, double r) {
  const auto q = covering_quadrature(u, x0, r);
  std::vector<double> mean(static_cast<std::size_t>(u.components()));
  q.mean(u, mean);
  return q.average(u, [&](std::span<const double> val, Point) {
    double s = 0.0;
    for (std::size_t c = 0; c < val.size(); ++c) s += (val[c] - mean[c]) * (val[c] - mean[c]);
    return std::sqrt(s);
  });
}

double average_deviation(const VectorField2D& u, Point x0, double r, std::span<const double> xi) {
  if (xi.size() != static_cast<std::size_t>(u.components())) throw ValidationError("xi has the wrong size", "xi");
  const auto q = covering_quadrature(u, x0, r);
  return q.average(u, [&](std::span<const double> val, Point) {
    double s = 0.0;
    for (std::size_t c = 0; c < val.size(); ++c) s += (val[c] - xi[c]) * (val[c] - xi[c]);
    return std::sqrt(s);
  });
}

double average_norm(const VectorField2D& u, Point x0, double r) {
  const auto q = covering_quadrature(u, x0, r);
  return q.average(u, [](std::span<const double> val, Point) { return norm_of(val); });
}

double ball_resolution(const Mesh2D& mesh, Point x0, double r) {
  double area = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (distance(mesh.centroid(t), x0) < r) {
      area += mesh.area(t);
      ++count;
    }
  }
  if (count == 0) return 0.0;
  return 2.0 * r / std::sqrt(2.0 * area / static_cast<double>(count));
}

ExcessDecay excess_decay_run(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& load, Point x0,
                             double r, double sigma, int levels, double alpha_V) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ParameterError("sigma must lie in (0, 1)");
  if (levels < 1) throw ParameterError("need at least one level");
  ExcessDecay out;
  auto& seq = out.sequence;
  seq.center = x0;
  seq.radius = r;
  seq.sigma = sigma;
  seq.alpha_V = alpha_V;
  seq.alpha_D = 0.5 * (alpha_V + 1.0);
  std::vector<double> mass_terms;
  for (int j = 0; j <= levels; ++j) {
    const double rj = r * std::pow(sigma, j + 1);
    if (ball_resolution(u.mesh(), x0, rj) < 10.0) {
      out.warnings.push_back("level " + std::to_string(j) + " under-resolved; sequence truncated at J = " +
                             std::to_string(j - 1));
      break;
    }
    seq.radii.push_back(rj);
    seq.values.push_back(excess(u, x0, rj));
    const double mass = load.ball_mass(x0, rj);
    mass_terms.push_back(mass > 0.0 ? rj * spec.G.inverse_derivative(mass / rj) : 0.0);
  }

  out.report = EstimateReport("excess-decay");
  out.report.metadata()["sigma"] = sigma;
  out.report.metadata()["alpha_D"] = seq.alpha_D;
  const double damp = std::pow(sigma, seq.alpha_D);
  std::vector<double> candidates{0.0};
  for (std::size_t j = 0; j + 1 < seq.values.size(); ++j) {
    out.report.add(seq.radii[j + 1], seq.values[j + 1], damp * seq.values[j] + mass_terms[j], "excess");
    if (seq.values[j] > 0.0) candidates.push_back(seq.values[j + 1] / (damp * seq.values[j]));
  }
  double best = std::numeric_limits<double>::infinity();
  out.c_D = out.c_E = std::numeric_limits<double>::infinity();
  for (double cD : candidates) {
    double cE = 0.0;
    bool feasible = true;
    for (std::size_t j = 0; j + 1 < seq.values.size(); ++j) {
      const double gap = seq.values[j + 1] - cD * damp * seq.values[j];
      if (gap <= 1e-14 * seq.values[j + 1]) continue;
      if (mass_terms[j] > 0.0) {
        cE = std::max(cE, gap / mass_terms[j]);
      } else {
        feasible = false;
        break;
      }
    }
    if (feasible && cD + cE < best) {
      best = cD + cE;
      out.c_D = cD;
      out.c_E = cE;
    }
  }

  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < seq.values.size(); ++j) {
    if (seq.values[j] > 0.0) {
      lx.push_back(std::log(seq.radii[j]));
      ly.push_back(std::log(seq.values[j]));
    }
  }
  out.decay_exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : std::numeric_limits<double>::quiet_NaN();
  return out;
}

PointwiseCheck pointwise_wolff_check(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& measure,
                                     Point x0, double r) {
  PointwiseCheck out;
  std::vector<double> value(static_cast<std::size_t>(u.components()));
  if (!u.evaluate(x0, value)) throw ValidationError("x0 lies outside the mesh", "x0");
  const auto w = wolff_potential(spec.G, measure, x0, r);
  out.wolff_divergent = w.divergent;
  out.wolff = w.divergent ? std::numeric_limits<double>::infinity() : w.value;

  const auto q = covering_quadrature(u, x0, r);
  std::vector<double> mean(value.size());
  q.mean(u, mean);
  const double avg = q.average(u, [](std::span<const double> v, Point) { return norm_of(v); });
  const double exc = q.average(u, [&](std::span<const double> v, Point) {
    double s = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) s += (v[c] - mean[c]) * (v[c] - mean[c]);
    return std::sqrt(s);
  });
  out.value_lhs = norm_of(value);
  out.value_rhs = out.wolff + avg;
  double d = 0.0;
  for (std::size_t c = 0; c < value.size(); ++c) d += (value[c] - mean[c]) * (value[c] - mean[c]);
  out.osc_lhs = std::sqrt(d);
  out.osc_rhs = out.wolff + exc;
  return out;
}

void record(EstimateReport& report, const PointwiseCheck& check, double axis, const std::string& series) {
  report.add(axis, check.value_lhs, check.value_rhs, series + "/value");
  report.add(axis, check.osc_lhs, check.osc_rhs, series + "/osc");
}

VmoProfile vmo_profile(const VectorField2D& u, Point x0, std::span<const double> radii, double threshold) {
  VmoProfile out;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k > 0 && !(radii[k] < radii[k - 1])) throw ValidationError("radii must decrease", "radii");
    out.samples.emplace_back(radii[k], excess(u, x0, radii[k]));
  }
  if (out.samples.empty()) return out;
  const double first = out.samples.front().second;
  const double last = out.samples.back().second;
  if (first <= 0.0) {
    out.vanishing = last <= 0.0;
    return out;
  }
  bool tail_decreasing = true;
  for (std::size_t k = out.samples.size() >= 3 ? out.samples.size() - 2 : 1; k < out.samples.size(); ++k)
    if (out.samples[k].second > out.samples[k - 1].second) tail_decreasing = false;
  out.vanishing = tail_decreasing && last <= threshold * first;
  return out;
}

CampanatoFit campanato_fit(const VectorField2D& u, Point x0, std::span<const double> radii) {
  if (radii.size() < 4) throw ValidationError("need at least four radii", "radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (*hi < 4.0 * *lo * (1.0 - 1e-12)) throw ValidationError("radii must span two dyadic octaves", "radii");
  CampanatoFit out;
  std::vector<double> lx, ly;
  for (double r : radii) {
    const double e = excess(u, x0, r);
    // Excess at rounding level relative to the field size counts as zero.
    if (e > 1e-13 * average_norm(u, x0, r)) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(e));
    }
  }
  if (lx.size() < 2) {
    out.exact_fit = true;
    out.theta_hat = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto f = fit_line(lx, ly);
  out.theta_hat = f.slope;
  out.c_hat = std::exp(f.intercept);
  out.residual = f.residual;
  return out;
}

AbsorbResult iterate_absorb(const std::function<double(double)>& phi, double R, double A, double B, double beta,
                            int grid) {
  if (!(R > 0.0 && beta > 0.0 && A >= 0.0 && B >= 0.0)) throw ParameterError("need R, beta > 0 and A, B >= 0");
  if (grid < 2) throw ParameterError("grid needs at least two points");
  AbsorbResult out;
  std::vector<double> r(static_cast<std::size_t>(grid)), v(r.size());
  for (int i = 0; i < grid; ++i) {
    r[static_cast<std::size_t>(i)] = 0.5 * R + 0.25 * R * i / (grid - 1);
    v[static_cast<std::size_t>(i)] = phi(r[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i < r.size() && out.hypothesis_ok; ++i) {
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      const double bound = 0.5 * v[j] + A + B / std::pow(r[j] - r[i], beta);
      if (v[i] > bound * (1.0 + 1e-12)) {
        out.hypothesis_ok = false;
        out.witness = {r[i], r[j]};
        break;
      }
    }
  }
  const double lambda = std::pow(0.75, 1.0 / beta);
  out.c = std::max(2.0, 3.0 * std::pow(4.0, beta) / std::pow(1.0 - lambda, beta));
  out.lhs = v.front();
  out.rhs = out.c * (A + B / std::pow(R, beta));
  out.conclusion_holds = out.hypothesis_ok && out.lhs <= out.rhs;
  return out;
}

GeometricResult iterate_geometric(const std::function<double(double)>& phi, double R, double A, double eps,
                                  double alpha, double B, double beta, double gamma, int grid) {
  if (!(beta < alpha) || !(gamma > beta && gamma < alpha)) throw ParameterError("need beta < gamma < alpha");
  if (!(R > 0.0 && A > 0.0 && B >= 0.0 && eps >= 0.0)) throw ParameterError("need R, A > 0 and B, eps >= 0");
  GeometricResult out;
  const double tau = std::min(0.5, std::pow(2.0 * A, 1.0 / (gamma - alpha)));
  out.eps0 = std::pow(tau, alpha);
  out.eps0_ok = eps < out.eps0;
  out.c = std::max(std::pow(tau, -gamma), std::pow(tau, -2.0 * beta) / (1.0 - std::pow(tau, gamma - beta)));

  // Log-spaced grid on (0, R].
  std::vector<double> r(static_cast<std::size_t>(grid)), v(r.size());
  for (int i = 0; i < grid; ++i) {
    r[static_cast<std::size_t>(i)] = R * std::pow(1e-4, 1.0 - static_cast<double>(i) / (grid - 1));
    v[static_cast<std::size_t>(i)] = phi(r[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i < r.size() && out.hypothesis_ok; ++i) {
    for (std::size_t j = i; j < r.size(); ++j) {
      const double bound = A * (std::pow(r[i] / r[j], alpha) + eps) * v[j] + B * std::pow(r[j], beta);
      if (v[i] > bound * (1.0 + 1e-12) + 1e-300) {
        out.hypothesis_ok = false;
        out.witness = {r[i], r[j]};
        break;
      }
    }
  }
  if (!out.hypothesis_ok || !out.eps0_ok) return out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i; j < r.size(); ++j) {
      const double rhs = out.c * (std::pow(r[i] / r[j], gamma) * v[j] + B * std::pow(r[i], beta));
      const double ratio = rhs > 0.0 ? v[i] / rhs : (v[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
  }
  out.conclusion_holds = out.worst_ratio <= 1.0 + 1e-12;
  return out;
}

double IdentityCheck::relative_error() const {
  const double scale = std::max(std::abs(rhs), std::numeric_limits<double>::min());
  return std::abs(lhs - rhs) / scale;
}

IdentityCheck cavalieri_identity(std::span<const double> omega, std::span<const double> f, double cell_volume,
                                 double gamma) {
  if (omega.size() != f.size()) throw ValidationError("omega and f differ in size", "f");
  if (!(gamma > -1.0)) throw ParameterError("gamma must exceed -1");
  std::vector<std::pair<double, double>> cells;
  IdentityCheck out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (omega[i] < 0.0) throw ValidationError("omega must be nonnegative", "omega");
    cells.emplace_back(std::abs(f[i]), omega[i] * cell_volume);
    out.rhs += omega[i] * cell_volume * std::pow(1.0 + std::abs(f[i]), -1.0 - gamma);
  }
  out.rhs /= 1.0 + gamma;
  std::sort(cells.begin(), cells.end());
  // On (a_k, a_{k+1}] the distribution function is the weight of cells with
  // |f| <= a_k; integrate (1+t)^{-2-gamma} there after s = 1/(1+t).
  auto piece = [&](double a, double b) {
    const double s0 = std::isinf(b) ? 0.0 : 1.0 / (1.0 + b);
    const double s1 = 1.0 / (1.0 + a);
    return (std::pow(s1, gamma + 1.0) - std::pow(s0, gamma + 1.0)) / (gamma + 1.0);
  };
  double weight = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    weight += cells[k].second;
    const double a = cells[k].first;
    const double b = k + 1 < cells.size() ? cells[k + 1].first : std::numeric_limits<double>::infinity();
    if (b > a && weight > 0.0) out.lhs += weight * piece(a, b);
  }
  return out;
}

IdentityCheck caccioppoli_check(const YoungFunction& G, const VectorField2D& v, Point x0, double r, double sigma,
                                double sigma_inner) {
  if (!(sigma_inner > 0.0 && sigma_inner < sigma && sigma <= 1.0)) throw ParameterError("need 0 < sigma' < sigma <= 1");
  IdentityCheck out;
  const auto inner = covering_quadrature(v, x0, sigma_inner * r);
  double sum = 0.0;
  for (const auto& node : inner.nodes) sum += node.weight * G.value(v.gradient_norm(static_cast<std::size_t>(node.triangle)));
  out.lhs = sum / inner.covered_area;
  const auto outer = covering_quadrature(v, x0, sigma * r);
  std::vector<double> mean(static_cast<std::size_t>(v.components()));
  outer.mean(v, mean);
  const double avg = outer.average(v, [&](std::span<const double> val, Point) {
    double s = 0.0;
    for (std::size_t c = 0; c < val.size(); ++c) s += (val[c] - mean[c]) * (val[c] - mean[c]);
    return G.value(std::sqrt(s) / r);
  });
  out.rhs = avg / std::pow(sigma - sigma_inner, G.indices().upper);
  return out;
}

IdentityCheck sobolev_poincare_check(const YoungFunction& G, const VectorField2D& u) {
  const auto& mesh = u.mesh();
  Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}, hi{-lo.x, -lo.y};
  for (const Point& p : mesh.vertices()) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const Point c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
  const auto q = BallQuadrature::build(mesh, c, 2.0 * distance(lo, hi) + 1.0, 2, 2);
  IdentityCheck out;
  out.lhs = q.covered_area * q.average(u, [&](std::span<const double> val, Point) {
    const double g = G.value(norm_of(val));
    return g * g;
  });
  double energy = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) energy += mesh.area(t) * G.value(u.gradient_norm(t));
  out.rhs = energy * energy;
  return out;
}

EstimateReport oscillation_decay_check(const YoungFunction& G, const VectorField2D& v, Point x0, double R,
                                       std::span<const double> deltas, double varsigma) {
  if (!(varsigma > 0.0 && varsigma < 1.0)) throw ParameterError("varsigma must lie in (0, 1)");
  const double kappa = 1.0 + (varsigma - 1.0) / G.indices().upper;
  EstimateReport report("oscillation-decay");
  report.metadata()["exponent"] = kappa;
  const double base = excess(v, x0, R);
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 0.25)) throw ParameterError("delta must lie in (0, 1/4]");
    report.add(d, excess(v, x0, d * R), std::pow(d, kappa) * base, "delta");
  }
  return report;
}

}  // namespace potlab
