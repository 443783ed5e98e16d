#include "potlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "potlab/error.hpp"
#include "potlab/json_fields.hpp"
#include "potlab/quadrature.hpp"

namespace potlab {

namespace jf = json_fields;
using nlohmann::json;

namespace {

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Point point_of(const json& j, const std::string& key) {
  auto v = jf::numbers(j, key);
  if (v.size() != 2) throw ValidationError("expected two coordinates", key);
  return {v[0], v[1]};
}

// Distance range from x to the axis-aligned box [a, b].
std::pair<double, double> box_distance(Point x, Point a, Point b) {
  const double dx = std::max({a.x - x.x, 0.0, x.x - b.x});
  const double dy = std::max({a.y - x.y, 0.0, x.y - b.y});
  const double fx = std::max(std::abs(x.x - a.x), std::abs(x.x - b.x));
  const double fy = std::max(std::abs(x.y - a.y), std::abs(x.y - b.y));
  return {std::hypot(dx, dy), std::hypot(fx, fy)};
}

// Fraction of the box [a, b] inside the closed disk, by cell-center inclusion
// after `depth` levels of subdivision of cut cells.
double covered_fraction(Point x0, double r, Point a, Point b, int depth) {
  auto [dmin, dmax] = box_distance(x0, a, b);
  if (dmax <= r) return 1.0;
  if (dmin > r) return 0.0;
  if (depth == 0) {
    Point c{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    return distance(c, x0) <= r ? 1.0 : 0.0;
  }
  const Point m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  return 0.25 * (covered_fraction(x0, r, a, m, depth - 1) + covered_fraction(x0, r, {m.x, a.y}, {b.x, m.y}, depth - 1) +
                 covered_fraction(x0, r, {a.x, m.y}, {m.x, b.y}, depth - 1) + covered_fraction(x0, r, m, b, depth - 1));
}

double grid_ball_mass(const GridDensity& g, Point x0, double r) {
  const auto& s = g.grid;
  const double dx = s.dx(), dy = s.dy();
  const int i0 = std::max(0, static_cast<int>(std::floor((x0.x - r - s.lo.x) / dx)));
  const int i1 = std::min(s.nx - 1, static_cast<int>(std::floor((x0.x + r - s.lo.x) / dx)));
  const int j0 = std::max(0, static_cast<int>(std::floor((x0.y - r - s.lo.y) / dy)));
  const int j1 = std::min(s.ny - 1, static_cast<int>(std::floor((x0.y + r - s.lo.y) / dy)));
  double sum = 0.0;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const double n = g.norm(i, j);
      if (n == 0.0) continue;
      Point a{s.lo.x + i * dx, s.lo.y + j * dy};
      Point b{a.x + dx, a.y + dy};
      sum += n * covered_fraction(x0, r, a, b, 2);
    }
  }
  return sum * s.cell_area();
}

// Integral of h over [a, b] after s = a + (b - a)(1 - cos phi)/2, which
// absorbs square-root endpoint behaviour.
template <class F>
double integrate_cosine(F&& h, double a, double b, int panels = 8) {
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  const double step = std::numbers::pi / panels;
  for (int k = 0; k < panels; ++k) {
    sum += quad::integrate(
        [&](double phi) {
          const double s = a + 0.5 * (b - a) * (1.0 - std::cos(phi));
          return h(s) * 0.5 * (b - a) * std::sin(phi);
        },
        k * step, (k + 1) * step, 24);
  }
  return sum;
}

double radial_disk_mass(const RadialProfile& p, double r) {
  const double rr = std::min(r, p.support);
  if (rr <= 0.0) return 0.0;
  return 2.0 * std::numbers::pi * p.coefficient * p.direction_norm() * std::pow(rr, 2.0 - p.exponent) /
         (2.0 - p.exponent);
}

double radial_ball_mass(const RadialProfile& p, Point x0, double r) {
  const double d = distance(x0, p.center);
  if (d <= 1e-14 * std::max(1.0, r)) return radial_disk_mass(p, r);
  // Circles |x - center| = s fully inside the ball.
  double mass = r > d ? radial_disk_mass(p, r - d) : 0.0;
  const double a = std::abs(d - r);
  const double b = std::min(p.support, d + r);
  if (b > a) {
    mass += integrate_cosine(
        [&](double s) {
          if (s <= 0.0) return 0.0;
          const double c = std::clamp((s * s + d * d - r * r) / (2.0 * s * d), -1.0, 1.0);
          return p.magnitude(s) * 2.0 * s * std::acos(c);
        },
        a, b);
  }
  return mass;
}

void check_components(int m) {
  if (m < 1 || m > 16) throw ValidationError("target dimension must be between 1 and 16", "components");
}

}  // namespace

double GridDensity::norm(int i, int j) const {
  const auto m = static_cast<std::size_t>(components);
  const std::size_t base = (static_cast<std::size_t>(j) * grid.nx + i) * m;
  return norm_of({values.data() + base, m});
}

double RadialProfile::direction_norm() const { return norm_of(direction); }

double RadialProfile::magnitude(double s) const {
  if (s >= support || s <= 0.0) return 0.0;
  return coefficient * direction_norm() * std::pow(s, -exponent);
}

MeasureData::MeasureData(Kind kind, int components) : kind_(std::move(kind)), components_(components) {}

MeasureData MeasureData::zero(int components) {
  check_components(components);
  return MeasureData(std::vector<Atom>{}, components);
}

MeasureData MeasureData::atoms(std::vector<Atom> atoms, int components) {
  check_components(components);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const std::string field = "atoms[" + std::to_string(k) + "]";
    if (static_cast<int>(atoms[k].weight.size()) != components)
      throw ValidationError("weight length differs from the target dimension", field + ".weight");
    if (!std::isfinite(atoms[k].point.x) || !std::isfinite(atoms[k].point.y))
      throw ValidationError("non-finite coordinates", field + ".point");
    for (double w : atoms[k].weight)
      if (!std::isfinite(w)) throw ValidationError("non-finite weight", field + ".weight");
  }
  return MeasureData(std::move(atoms), components);
}

MeasureData MeasureData::grid(GridDensity density) {
  check_components(density.components);
  const auto& s = density.grid;
  if (s.nx < 1 || s.ny < 1) throw ValidationError("grid needs at least one cell per axis", "nx");
  if (!(s.hi.x > s.lo.x) || !(s.hi.y > s.lo.y)) throw ValidationError("empty grid extent", "hi");
  const auto expected = static_cast<std::size_t>(s.nx) * s.ny * density.components;
  if (density.values.size() != expected)
    throw ValidationError("expected nx * ny * m values, got " + std::to_string(density.values.size()), "values");
  for (double v : density.values)
    if (!std::isfinite(v)) throw ValidationError("non-finite density value", "values");
  const int m = density.components;
  return MeasureData(std::move(density), m);
}

MeasureData MeasureData::radial(RadialProfile profile) {
  const int m = static_cast<int>(profile.direction.size());
  check_components(m);
  if (!(profile.exponent >= 0.0 && profile.exponent < 2.0))
    throw ValidationError("radial exponent must lie in [0, 2) for finite mass", "exponent");
  if (!(profile.support > 0.0)) throw ValidationError("support radius must be positive", "support");
  if (!(profile.coefficient >= 0.0)) throw ValidationError("coefficient must be nonnegative", "coefficient");
  return MeasureData(std::move(profile), m);
}

MeasureData MeasureData::from_json(const json& j) {
  const std::string kind = jf::string(j, "kind");
  if (kind == "zero") return zero(jf::integer_or(j, "components", 1));
  if (kind == "atoms") {
    const json& list = jf::require(j, "atoms");
    if (!list.is_array()) throw ValidationError("expected an array", "atoms");
    std::vector<Atom> atoms;
    int m = jf::integer_or(j, "components", 0);
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string field = "atoms[" + std::to_string(k) + "]";
      try {
        Atom a{point_of(list[k], "point"), jf::numbers(list[k], "weight")};
        if (m == 0) m = static_cast<int>(a.weight.size());
        atoms.push_back(std::move(a));
      } catch (const ValidationError& e) {
        throw e.nested(field);
      }
    }
    if (m == 0) m = 1;
    return MeasureData::atoms(std::move(atoms), m);
  }
  if (kind == "grid") {
    if (j.contains("csv")) {
      const std::string path = jf::string(j, "csv");
      std::ifstream in(path);
      if (!in) throw ValidationError("cannot open grid file " + path, "csv");
      return grid(read_grid_csv(in));
    }
    GridDensity g;
    g.grid.lo = point_of(j, "lo");
    g.grid.hi = point_of(j, "hi");
    g.grid.nx = jf::integer_or(j, "nx", 0);
    g.grid.ny = jf::integer_or(j, "ny", 0);
    g.components = jf::integer_or(j, "components", 1);
    g.values = jf::numbers(j, "values");
    return grid(std::move(g));
  }
  if (kind == "radial" || kind == "uniform_disk") {
    RadialProfile p;
    p.center = point_of(j, "center");
    p.direction = jf::numbers_or(j, "direction", {1.0});
    if (kind == "radial") {
      p.coefficient = jf::number_or(j, "coefficient", 1.0);
      p.exponent = jf::number_or(j, "exponent", 0.0);
      p.support = jf::number(j, "support");
    } else {
      p.support = jf::number(j, "radius");
      if (!(p.support > 0.0)) throw ValidationError("radius must be positive", "radius");
      const double mass = jf::number_or(j, "mass", 1.0);
      const double dn = norm_of(p.direction);
      if (!(dn > 0.0)) throw ValidationError("direction must be nonzero", "direction");
      p.coefficient = mass / (std::numbers::pi * p.support * p.support * dn);
      p.exponent = 0.0;
    }
    return radial(std::move(p));
  }
  throw ValidationError("unknown measure kind '" + kind + "'", "kind");
}

json MeasureData::to_json() const {
  json j;
  if (const auto* a = std::get_if<std::vector<Atom>>(&kind_)) {
    if (a->empty()) return {{"kind", "zero"}, {"components", components_}};
    j["kind"] = "atoms";
    j["components"] = components_;
    j["atoms"] = json::array();
    for (const auto& atom : *a) j["atoms"].push_back({{"point", {atom.point.x, atom.point.y}}, {"weight", atom.weight}});
  } else if (const auto* g = std::get_if<GridDensity>(&kind_)) {
    j = {{"kind", "grid"},
         {"lo", {g->grid.lo.x, g->grid.lo.y}},
         {"hi", {g->grid.hi.x, g->grid.hi.y}},
         {"nx", g->grid.nx},
         {"ny", g->grid.ny},
         {"components", g->components},
         {"values", g->values}};
  } else {
    const auto& p = std::get<RadialProfile>(kind_);
    j = {{"kind", "radial"},
         {"center", {p.center.x, p.center.y}},
         {"direction", p.direction},
         {"coefficient", p.coefficient},
         {"exponent", p.exponent},
         {"support", p.support}};
  }
  return j;
}

double MeasureData::ball_mass(Point x0, double r) const {
  if (r < 0.0) throw DomainError("ball radius must be nonnegative");
  if (const auto* a = std::get_if<std::vector<Atom>>(&kind_)) {
    double sum = 0.0;
    for (const auto& atom : *a)
      if (distance(atom.point, x0) <= r) sum += norm_of(atom.weight);
    return sum;
  }
  if (r == 0.0) return 0.0;
  if (const auto* g = std::get_if<GridDensity>(&kind_)) return grid_ball_mass(*g, x0, r);
  return radial_ball_mass(std::get<RadialProfile>(kind_), x0, r);
}

double MeasureData::total_variation() const {
  if (const auto* a = std::get_if<std::vector<Atom>>(&kind_)) {
    double sum = 0.0;
    for (const auto& atom : *a) sum += norm_of(atom.weight);
    return sum;
  }
  if (const auto* g = std::get_if<GridDensity>(&kind_)) {
    double sum = 0.0;
    for (int j = 0; j < g->grid.ny; ++j)
      for (int i = 0; i < g->grid.nx; ++i) sum += g->norm(i, j);
    return sum * g->grid.cell_area();
  }
  const auto& p = std::get<RadialProfile>(kind_);
  return radial_disk_mass(p, p.support);
}

std::vector<double> MeasureData::total() const {
  std::vector<double> out(static_cast<std::size_t>(components_), 0.0);
  if (const auto* a = std::get_if<std::vector<Atom>>(&kind_)) {
    for (const auto& atom : *a)
      for (int c = 0; c < components_; ++c) out[c] += atom.weight[c];
  } else if (const auto* g = std::get_if<GridDensity>(&kind_)) {
    for (std::size_t k = 0; k < g->values.size(); ++k) out[k % components_] += g->values[k] * g->grid.cell_area();
  } else {
    const auto& p = std::get<RadialProfile>(kind_);
    const double dn = p.direction_norm();
    const double mass = radial_disk_mass(p, p.support);
    for (int c = 0; c < components_; ++c) out[c] = dn > 0.0 ? mass * p.direction[c] / dn : 0.0;
  }
  return out;
}

MeasureData MeasureData::scaled(double lambda) const {
  if (const auto* a = std::get_if<std::vector<Atom>>(&kind_)) {
    auto copy = *a;
    for (auto& atom : copy)
      for (double& w : atom.weight) w *= lambda;
    return MeasureData(std::move(copy), components_);
  }
  if (const auto* g = std::get_if<GridDensity>(&kind_)) {
    auto copy = *g;
    for (double& v : copy.values) v *= lambda;
    return MeasureData(std::move(copy), components_);
  }
  auto copy = std::get<RadialProfile>(kind_);
  for (double& d : copy.direction) d *= lambda;
  return MeasureData(std::move(copy), components_);
}

void write_grid_csv(std::ostream& os, const GridDensity& g) {
  os << "nx,ny,m,x_min,y_min,x_max,y_max\n";
  os << g.grid.nx << ',' << g.grid.ny << ',' << g.components << ',' << format_number(g.grid.lo.x) << ','
     << format_number(g.grid.lo.y) << ',' << format_number(g.grid.hi.x) << ',' << format_number(g.grid.hi.y) << '\n';
  for (int c = 0; c < g.components; ++c) os << (c ? "," : "") << 'f' << c + 1;
  os << '\n';
  const auto m = static_cast<std::size_t>(g.components);
  for (std::size_t k = 0; k < g.values.size(); k += m) {
    for (std::size_t c = 0; c < m; ++c) os << (c ? "," : "") << format_number(g.values[k + c]);
    os << '\n';
  }
}

GridDensity read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("nx,ny,m", 0) != 0) throw ValidationError("missing grid header", "csv");
  if (!std::getline(is, line)) throw ValidationError("missing grid extents", "csv");
  std::vector<double> head;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) head.push_back(std::stod(cell));
  }
  if (head.size() != 7) throw ValidationError("grid header needs seven entries", "csv");
  GridDensity g;
  g.grid.nx = static_cast<int>(head[0]);
  g.grid.ny = static_cast<int>(head[1]);
  g.components = static_cast<int>(head[2]);
  g.grid.lo = {head[3], head[4]};
  g.grid.hi = {head[5], head[6]};
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        g.values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ValidationError("malformed number '" + cell + "'", "csv");
      }
    }
  }
  const auto expected = static_cast<std::size_t>(g.grid.nx) * g.grid.ny * g.components;
  if (g.values.size() != expected) throw ValidationError("grid value count does not match header", "csv");
  return g;
}

EstimateReport check_morrey(const MeasureData& measure, const YoungFunction& G, double theta,
                            std::span<const double> radii, std::span<const Point> centers) {
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0, 1)");
  EstimateReport report("morrey");
  report.metadata()["theta"] = theta;
  report.metadata()["young"] = G.to_json();
  const int n = measure.dimension();
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const std::string series = "center" + std::to_string(k);
    for (double r : radii) {
      if (!(r > 0.0)) throw DomainError("Morrey radii must be positive");
      const double rhs = std::pow(r, n - 1) * G.derivative(std::pow(r, theta - 1.0));
      report.add(r, measure.ball_mass(centers[k], r), rhs, series);
    }
  }
  return report;
}

namespace {

double bump(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

double bump_normalisation() {
  static const double c = [] {
    double integral = 0.0;
    const int panels = 64;
    for (int k = 0; k < panels; ++k)
      integral += quad::integrate([](double r) { return bump(r) * r; }, double(k) / panels, double(k + 1) / panels, 16);
    return 1.0 / (2.0 * std::numbers::pi * integral);
  }();
  return c;
}

struct Source {
  Point point;
  const double* weight;
};

}  // namespace

double mollifier_kernel(double r) { return bump_normalisation() * bump(r); }

double mollifier_peak() { return bump_normalisation() * std::exp(-1.0); }

MeasureData mollify(const MeasureData& measure, double width, Point lo, Point hi, int cells_per_width) {
  if (!(width > 0.0)) throw ValidationError("mollifier width must be positive", "width");
  if (cells_per_width < 2) throw ValidationError("need at least two cells per width", "cells_per_width");
  if (!(hi.x > lo.x && hi.y > lo.y)) throw ValidationError("empty domain", "domain");
  if (width > std::min(hi.x - lo.x, hi.y - lo.y))
    throw ValidationError("mollifier width exceeds the domain", "width");

  const int m = measure.components();
  const double pixel = width / cells_per_width;
  GridDensity out;
  out.components = m;
  out.grid.lo = lo;
  out.grid.nx = static_cast<int>(std::ceil((hi.x - lo.x) / pixel - 1e-9));
  out.grid.ny = static_cast<int>(std::ceil((hi.y - lo.y) / pixel - 1e-9));
  out.grid.hi = {lo.x + out.grid.nx * pixel, lo.y + out.grid.ny * pixel};
  out.values.assign(static_cast<std::size_t>(out.grid.nx) * out.grid.ny * m, 0.0);

  // Sources carry a mass vector at a point; continuous kinds are first
  // rasterised onto the output pixels.
  std::vector<Source> sources;
  std::vector<double> raster;
  if (const auto* atoms = std::get_if<std::vector<Atom>>(&measure.kind())) {
    for (const auto& a : *atoms) {
      if (a.point.x < lo.x || a.point.x > hi.x || a.point.y < lo.y || a.point.y > hi.y)
        throw ValidationError("atom lies outside the mollification domain", "measure");
      sources.push_back({a.point, a.weight.data()});
    }
  } else if (const auto* g = std::get_if<GridDensity>(&measure.kind())) {
    raster.resize(g->values.size());
    const double area = g->grid.cell_area();
    for (std::size_t k = 0; k < raster.size(); ++k) raster[k] = g->values[k] * area;
    for (int j = 0; j < g->grid.ny; ++j)
      for (int i = 0; i < g->grid.nx; ++i)
        sources.push_back({g->grid.cell_center(i, j), raster.data() + (static_cast<std::size_t>(j) * g->grid.nx + i) * m});
  } else {
    const auto& p = std::get<RadialProfile>(measure.kind());
    const int sub = 4;
    const double dn = p.direction_norm();
    raster.assign(out.values.size(), 0.0);
    double raster_mass = 0.0;
    for (int j = 0; j < out.grid.ny; ++j) {
      for (int i = 0; i < out.grid.nx; ++i) {
        const Point c = out.grid.cell_center(i, j);
        if (distance(c, p.center) > p.support + pixel) continue;
        double sum = 0.0;
        for (int b = 0; b < sub; ++b)
          for (int a = 0; a < sub; ++a) {
            Point q{c.x + ((a + 0.5) / sub - 0.5) * pixel, c.y + ((b + 0.5) / sub - 0.5) * pixel};
            sum += p.magnitude(distance(q, p.center));
          }
        const double mass = sum / (sub * sub) * pixel * pixel;
        raster_mass += mass;
        for (int cc = 0; cc < m; ++cc)
          raster[(static_cast<std::size_t>(j) * out.grid.nx + i) * m + cc] = dn > 0.0 ? mass * p.direction[cc] / dn : 0.0;
      }
    }
    const double exact = measure.total_variation();
    if (raster_mass > 0.0)
      for (double& v : raster) v *= exact / raster_mass;
    for (int j = 0; j < out.grid.ny; ++j)
      for (int i = 0; i < out.grid.nx; ++i)
        sources.push_back({out.grid.cell_center(i, j), raster.data() + (static_cast<std::size_t>(j) * out.grid.nx + i) * m});
  }

  const int reach = cells_per_width + 1;
  const double inv_area = 1.0 / (pixel * pixel);
  std::vector<double> stamp;
  for (const auto& s : sources) {
    double wnorm = 0.0;
    for (int c = 0; c < m; ++c) wnorm += std::abs(s.weight[c]);
    if (wnorm == 0.0) continue;
    const int ci = std::clamp(static_cast<int>(std::floor((s.point.x - lo.x) / pixel)), 0, out.grid.nx - 1);
    const int cj = std::clamp(static_cast<int>(std::floor((s.point.y - lo.y) / pixel)), 0, out.grid.ny - 1);
    const int i0 = std::max(0, ci - reach), i1 = std::min(out.grid.nx - 1, ci + reach);
    const int j0 = std::max(0, cj - reach), j1 = std::min(out.grid.ny - 1, cj + reach);
    stamp.assign(static_cast<std::size_t>(i1 - i0 + 1) * (j1 - j0 + 1), 0.0);
    double total = 0.0;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const double v = bump(distance(out.grid.cell_center(i, j), s.point) / width);
        stamp[static_cast<std::size_t>(j - j0) * (i1 - i0 + 1) + (i - i0)] = v;
        total += v;
      }
    if (total == 0.0) {
      // Kernel narrower than a pixel around this source: deposit in its cell.
      stamp.assign(stamp.size(), 0.0);
      stamp[static_cast<std::size_t>(cj - j0) * (i1 - i0 + 1) + (ci - i0)] = 1.0;
      total = 1.0;
    }
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const double w = stamp[static_cast<std::size_t>(j - j0) * (i1 - i0 + 1) + (i - i0)] / total * inv_area;
        if (w == 0.0) continue;
        double* cell = out.values.data() + (static_cast<std::size_t>(j) * out.grid.nx + i) * m;
        for (int c = 0; c < m; ++c) cell[c] += w * s.weight[c];
      }
  }
  return MeasureData::grid(std::move(out));
}

CoefficientField CoefficientField::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError("coefficient must be positive", "value");
  CoefficientField a;
  a.base_ = a.lower_ = a.upper_ = value;
  return a;
}

CoefficientField CoefficientField::cosine(double base, double amplitude, double frequency) {
  if (!(base - std::abs(amplitude) > 0.0)) throw ValidationError("base must exceed |amplitude|", "amplitude");
  if (!(frequency >= 0.0)) throw ValidationError("frequency must be nonnegative", "frequency");
  CoefficientField a;
  a.shape_ = Shape::cosine;
  a.modulus_ = amplitude == 0.0 || frequency == 0.0 ? Modulus::constant : Modulus::lipschitz;
  a.base_ = base;
  a.amplitude_ = amplitude;
  a.parameter_ = frequency;
  a.lower_ = base - std::abs(amplitude);
  a.upper_ = base + std::abs(amplitude);
  return a;
}

CoefficientField CoefficientField::holder(double base, double amplitude, double exponent, Point center) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw ValidationError("exponent must lie in (0, 1]", "exponent");
  if (!(base + std::min(0.0, amplitude) > 0.0)) throw ValidationError("coefficient must stay positive", "amplitude");
  CoefficientField a;
  a.shape_ = Shape::holder;
  a.modulus_ = amplitude == 0.0 ? Modulus::constant : Modulus::holder;
  a.base_ = base;
  a.amplitude_ = amplitude;
  a.parameter_ = exponent;
  a.center_ = center;
  a.lower_ = base + std::min(0.0, amplitude);
  a.upper_ = base + std::max(0.0, amplitude);
  return a;
}

CoefficientField CoefficientField::from_json(const json& j) {
  if (j.is_number()) return constant(j.get<double>());
  const std::string kind = jf::string_or(j, "kind", "constant");
  if (kind == "constant") return constant(jf::number_or(j, "value", 1.0));
  if (kind == "cosine")
    return cosine(jf::number_or(j, "base", 1.0), jf::number(j, "amplitude"), jf::number(j, "frequency"));
  if (kind == "holder") {
    Point c{};
    if (j.contains("center")) c = point_of(j, "center");
    return holder(jf::number_or(j, "base", 1.0), jf::number(j, "amplitude"), jf::number(j, "exponent"), c);
  }
  throw ValidationError("unknown coefficient kind '" + kind + "'", "kind");
}

json CoefficientField::to_json() const {
  switch (shape_) {
    case Shape::constant:
      return {{"kind", "constant"}, {"value", base_}};
    case Shape::cosine:
      return {{"kind", "cosine"}, {"base", base_}, {"amplitude", amplitude_}, {"frequency", parameter_}};
    case Shape::holder:
      return {{"kind", "holder"},
              {"base", base_},
              {"amplitude", amplitude_},
              {"exponent", parameter_},
              {"center", {center_.x, center_.y}}};
  }
  return {};
}

double CoefficientField::operator()(Point x) const {
  switch (shape_) {
    case Shape::constant:
      return base_;
    case Shape::cosine:
      return base_ + amplitude_ * std::cos(parameter_ * x.x) * std::cos(parameter_ * x.y);
    case Shape::holder:
      return base_ + amplitude_ * std::pow(std::min(1.0, distance(x, center_)), parameter_);
  }
  return base_;
}

double CoefficientField::modulus(double r) const {
  const double cap = upper_ - lower_;
  switch (modulus_) {
    case Modulus::constant:
      return 0.0;
    case Modulus::lipschitz:
      return std::min(cap, std::abs(amplitude_) * parameter_ * std::numbers::sqrt2 * r);
    case Modulus::holder:
      return std::min(cap, std::abs(amplitude_) * std::pow(r, parameter_));
  }
  return 0.0;
}

}  // namespace potlab
