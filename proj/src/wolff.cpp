#include "potlab/wolff.hpp"

#include <cmath>
#include <numbers>

#include "potlab/error.hpp"
#include "potlab/quadrature.hpp"
#include "potlab/rearrange.hpp"

namespace potlab {

namespace {

double ginv(const YoungFunction& G, double y) { return y > 0.0 ? G.inverse_derivative(y) : 0.0; }

void check_query(double R, const WolffOptions& opt) {
  if (!(R > 0.0)) throw DomainError("Wolff radius must be positive");
  if (opt.levels < 8) throw ParameterError("at least 8 dyadic levels are required");
}

}  // namespace

WolffResult wolff_potential(const YoungFunction& G, const BallMass& mass, double R, int n, const WolffOptions& opt) {
  check_query(R, opt);
  quad::DyadicOptions d;
  d.levels = opt.levels;
  d.nodes = opt.nodes;
  d.fit_levels = opt.fit_levels;
  auto res = quad::dyadic_integral([&](double r) { return ginv(G, mass(r) / std::pow(r, n - 1)); }, R, d);
  WolffResult out;
  out.value = res.value;
  out.divergent = res.divergent;
  out.decay_ratio = res.decay_ratio;
  out.levels = opt.levels;
  out.shells = std::move(res.shells);
  return out;
}

WolffResult wolff_potential(const YoungFunction& G, const MeasureData& mu, Point x0, double R,
                            const WolffOptions& opt) {
  check_query(R, opt);
  const auto* atoms = std::get_if<std::vector<Atom>>(&mu.kind());
  const auto* power = std::get_if<PowerLaw>(&G.family());
  if (atoms && power && atoms->size() == 1 && distance(atoms->front().point, x0) == 0.0) {
    // g^{-1}(M / r^{n-1}) = (M / p)^{1/(p-1)} r^{-(n-1)/(p-1)}.
    const double M = mu.total_variation();
    const double q = 1.0 / (power->p - 1.0);
    const double e = 1.0 - (mu.dimension() - 1) * q;
    WolffResult out;
    out.closed_form = true;
    out.levels = opt.levels;
    if (M == 0.0) return out;
    const double c = std::pow(M / power->p, q);
    if (e <= 0.0) {
      out.divergent = true;
      out.decay_ratio = std::exp2(-e);
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value = c * std::pow(R, e) / e;
    out.decay_ratio = std::exp2(-e);
    return out;
  }
  return wolff_potential(G, [&](double r) { return mu.ball_mass(x0, r); }, R, mu.dimension(), opt);
}

double wolff_dyadic_sum(const YoungFunction& G, const BallMass& mass, double R, int n, int levels) {
  if (!(R > 0.0)) throw DomainError("Wolff radius must be positive");
  double sum = 0.0;
  for (int k = 1; k <= levels; ++k) {
    const double Rk = std::ldexp(R, 1 - k);
    sum += Rk * ginv(G, mass(Rk) / std::pow(Rk, n - 1));
  }
  return sum;
}

double wolff_dyadic_sum(const YoungFunction& G, const MeasureData& mu, Point x0, double R, int levels) {
  return wolff_dyadic_sum(G, [&](double r) { return mu.ball_mass(x0, r); }, R, mu.dimension(), levels);
}

std::vector<std::pair<double, double>> shrink_profile(const YoungFunction& G, const BallMass& mass, double R, int n,
                                                      int levels) {
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < levels; ++k) {
    const double rho = std::ldexp(R, -k);
    out.emplace_back(rho, rho * ginv(G, mass(rho) / std::pow(rho, n - 1)));
  }
  return out;
}

RearrangementBound rearrangement_bound(const YoungFunction& G, const GridDensity& F, Point x, double R,
                                       const WolffOptions& opt) {
  check_query(R, opt);
  const auto& s = F.grid;
  std::vector<double> values, volumes;
  const int sub = 4;
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const double v = F.norm(i, j);
      if (v < 0.0 || !std::isfinite(v)) throw ValidationError("density must be finite", "values");
      if (v == 0.0) continue;
      const Point c = s.cell_center(i, j);
      if (distance(c, x) > R + std::hypot(s.dx(), s.dy())) continue;
      int inside = 0;
      for (int b = 0; b < sub; ++b)
        for (int a = 0; a < sub; ++a) {
          Point q{c.x + ((a + 0.5) / sub - 0.5) * s.dx(), c.y + ((b + 0.5) / sub - 0.5) * s.dy()};
          if (distance(q, x) <= R) ++inside;
        }
      if (inside == 0) continue;
      values.push_back(v);
      volumes.push_back(s.cell_area() * inside / (sub * sub));
    }
  }

  RearrangementBound out;
  const MeasureData mu = MeasureData::grid(F);
  const auto lhs = wolff_potential(G, [&](double r) { return mu.ball_mass(x, r); }, R, 2, opt);
  out.lhs = lhs.value;
  out.lhs_divergent = lhs.divergent;

  if (!values.empty()) {
    const auto profile = decreasing_rearrangement(values, volumes);
    const double ball = std::numbers::pi * R * R;
    quad::DyadicOptions d;
    d.levels = 60;
    d.nodes = 16;
    d.fit_levels = opt.fit_levels;
    auto rhs = quad::dyadic_integral(
        [&](double t) {
          const double root = std::sqrt(t);
          return root * ginv(G, root * profile.maximal(t)) / t;
        },
        ball, d);
    out.rhs = rhs.value;
    out.rhs_divergent = rhs.divergent;
  }

  if (out.rhs > 0.0) {
    out.ratio = out.lhs / out.rhs;
  } else {
    out.undefined_ratio = out.lhs > 0.0 || values.empty();
  }
  out.inconsistent = out.lhs_divergent && !out.rhs_divergent;
  return out;
}

void write_wolff_csv_header(std::ostream& os) { os << "x0,y0,R,value,divergent,levels,decay_ratio,closed_form\n"; }

void write_wolff_csv_row(std::ostream& os, Point x0, double R, const WolffResult& r) {
  os << format_number(x0.x) << ',' << format_number(x0.y) << ',' << format_number(R) << ','
     << (r.divergent ? std::string("divergent") : format_number(r.value)) << ',' << (r.divergent ? 1 : 0) << ','
     << r.levels << ',' << format_number(r.decay_ratio) << ',' << (r.closed_form ? 1 : 0) << '\n';
}

}  // namespace potlab
