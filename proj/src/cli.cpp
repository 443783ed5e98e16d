#include "potlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include "potlab/error.hpp"
#include "potlab/json_fields.hpp"
#include "potlab/svg.hpp"
#include "potlab/verify.hpp"
#include "potlab/wolff.hpp"

namespace potlab::cli {

namespace fs = std::filesystem;
namespace jf = json_fields;
using nlohmann::json;

namespace {

Point point_of(const json& j, const std::string& key) {
  auto v = jf::numbers(j, key);
  if (v.size() != 2) throw ValidationError("expected two coordinates", key);
  return {v[0], v[1]};
}

std::uint64_t seed_of(const json& j) {
  const json& v = j.at("seed");
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ValidationError("expected a nonnegative integer", "seed");
  return v.get<std::uint64_t>();
}

json point_json(Point p) { return json::array({p.x, p.y}); }

// Allowed task parameters: n number, i integer, l number list, p point, o object.
const std::map<std::string, std::map<std::string, char>>& parameter_schema() {
  static const std::map<std::string, std::map<std::string, char>> schema{
      {"young-audit", {{"t_min", 'n'}, {"t_max", 'n'}, {"points", 'i'}, {"pairs", 'i'}}},
      {"wolff", {{"x0", 'p'}, {"radii", 'l'}, {"levels", 'i'}, {"shrink_levels", 'i'}}},
      {"rearrangement-bound", {{"samples", 'i'}, {"grid", 'i'}, {"bumps", 'i'}, {"x", 'p'}, {"R", 'n'}}},
      {"solve", {{"mollify_h", 'n'}, {"boundary", 'o'}}},
      {"sola", {{"widths", 'l'}, {"widths_h", 'l'}, {"boundary", 'o'}}},
      {"comparison", {{"x0", 'p'}, {"radii", 'l'}, {"mollify_h", 'n'}, {"boundary", 'o'}}},
      {"excess-decay",
       {{"x0", 'p'}, {"r", 'n'}, {"sigma", 'n'}, {"levels", 'i'}, {"alpha_V", 'n'}, {"mollify_h", 'n'}, {"boundary", 'o'}}},
      {"pointwise", {{"x0", 'p'}, {"radii", 'l'}, {"mollify_h", 'n'}, {"boundary", 'o'}}},
      {"vmo", {{"x0", 'p'}, {"radii", 'l'}, {"threshold", 'n'}, {"mollify_h", 'n'}, {"boundary", 'o'}}},
      {"campanato", {{"x0", 'p'}, {"radii", 'l'}, {"theta", 'n'}, {"mollify_h", 'n'}, {"boundary", 'o'}}},
  };
  return schema;
}

void check_params(const std::string& task, const json& params) {
  if (!params.is_object()) throw ValidationError("expected an object", "");
  const auto& allowed = parameter_schema().at(task);
  for (auto it = params.begin(); it != params.end(); ++it) {
    auto a = allowed.find(it.key());
    if (a == allowed.end()) throw ValidationError("unknown parameter for task " + task, it.key());
    switch (a->second) {
      case 'n':
        jf::number(params, it.key());
        break;
      case 'i':
        jf::integer_or(params, it.key(), 0);
        break;
      case 'l':
        jf::numbers(params, it.key());
        break;
      case 'p':
        point_of(params, it.key());
        break;
      case 'o':
        if (!it->is_object()) throw ValidationError("expected an object", it.key());
        break;
    }
  }
}

template <class Parse>
auto field(const json& j, const std::string& key, Parse&& parse) {
  try {
    return parse(j.at(key));
  } catch (const ValidationError& e) {
    throw e.nested(key);
  }
}

const json* find_builtin(const std::string& id) {
  for (const auto& e : list_builtin_scenarios())
    if (e.id == id) return &e.descriptor;
  return nullptr;
}

}  // namespace

Domain Domain::from_json(const json& j) {
  Domain d;
  const std::string shape = jf::string_or(j, "shape", "disk");
  if (shape == "disk" || shape == "graded_disk") {
    d.shape = shape == "disk" ? Shape::disk : Shape::graded_disk;
    d.center = j.contains("center") ? point_of(j, "center") : Point{};
    d.radius = jf::number_or(j, "radius", 1.0);
    if (!(d.radius > 0.0)) throw ValidationError("radius must be positive", "radius");
    if (d.shape == Shape::graded_disk) {
      d.inner_radius = jf::number(j, "inner_radius");
      d.sectors = jf::integer_or(j, "sectors", 24);
      if (!(d.inner_radius > 0.0 && d.inner_radius < d.radius))
        throw ValidationError("inner radius must lie in (0, radius)", "inner_radius");
      if (d.sectors < 6) throw ValidationError("need at least six sectors", "sectors");
    }
  } else if (shape == "rectangle") {
    d.shape = Shape::rectangle;
    d.lo = point_of(j, "lo");
    d.hi = point_of(j, "hi");
    if (!(d.hi.x > d.lo.x && d.hi.y > d.lo.y)) throw ValidationError("empty rectangle", "hi");
  } else {
    throw ValidationError("unknown domain shape '" + shape + "'", "shape");
  }
  return d;
}

json Domain::to_json() const {
  switch (shape) {
    case Shape::disk:
      return {{"shape", "disk"}, {"center", point_json(center)}, {"radius", radius}};
    case Shape::graded_disk:
      return {{"shape", "graded_disk"},
              {"center", point_json(center)},
              {"radius", radius},
              {"inner_radius", inner_radius},
              {"sectors", sectors}};
    case Shape::rectangle:
      return {{"shape", "rectangle"}, {"lo", point_json(lo)}, {"hi", point_json(hi)}};
  }
  return {};
}

std::shared_ptr<const Mesh2D> Domain::mesh(double h) const {
  switch (shape) {
    case Shape::disk:
      return std::make_shared<const Mesh2D>(Mesh2D::disk(center, radius, h));
    case Shape::graded_disk:
      return std::make_shared<const Mesh2D>(Mesh2D::graded_disk(center, radius, h, inner_radius, sectors));
    case Shape::rectangle: {
      const int nx = std::max(1, static_cast<int>(std::lround((hi.x - lo.x) / h)));
      const int ny = std::max(1, static_cast<int>(std::lround((hi.y - lo.y) / h)));
      return std::make_shared<const Mesh2D>(Mesh2D::rectangle(lo, hi, nx, ny));
    }
  }
  return nullptr;
}

std::pair<Point, Point> Domain::box() const {
  if (shape == Shape::rectangle) return {lo, hi};
  return {{center.x - radius, center.y - radius}, {center.x + radius, center.y + radius}};
}

OperatorSpec Scenario::operator_spec() const { return {*young, coefficient, 2, measure->components()}; }

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ValidationError("expected a scenario object", "");
  Scenario s;
  s.source = j;
  s.id = jf::string(j, "id");
  if (s.id.empty() || s.id.find_first_of("/\\") != std::string::npos || s.id == "." || s.id == "..")
    throw ValidationError("id must be a plain non-empty name", "id");
  s.task = jf::string(j, "task");
  const auto& tasks = task_names();
  if (std::find(tasks.begin(), tasks.end(), s.task) == tasks.end())
    throw ValidationError("unknown task '" + s.task + "'", "task");
  s.description = jf::string_or(j, "description", "");
  s.young = field(j, "young", [](const json& d) { return std::make_shared<const YoungFunction>(YoungFunction::from_json(d)); });
  if (j.contains("coefficient"))
    s.coefficient = field(j, "coefficient", [](const json& d) { return CoefficientField::from_json(d); });
  s.measure = j.contains("measure")
                  ? field(j, "measure", [](const json& d) { return std::make_shared<const MeasureData>(MeasureData::from_json(d)); })
                  : std::make_shared<const MeasureData>(MeasureData::zero(1));
  if (j.contains("domain")) s.domain = field(j, "domain", [](const json& d) { return Domain::from_json(d); });
  if (j.contains("resolutions")) {
    s.resolutions = jf::numbers(j, "resolutions");
  } else {
    s.resolutions = {jf::number_or(j, "resolution", 1.0 / 32)};
  }
  if (s.resolutions.empty()) throw ValidationError("need at least one resolution", "resolutions");
  for (std::size_t k = 0; k < s.resolutions.size(); ++k)
    if (!(s.resolutions[k] > 0.0 && s.resolutions[k] <= 0.5))
      throw ValidationError("resolution must lie in (0, 1/2]", "resolutions[" + std::to_string(k) + "]");
  if (j.contains("params")) {
    s.params = j.at("params");
    field(j, "params", [&](const json& p) {
      check_params(s.task, p);
      return 0;
    });
    if (s.params.contains("boundary")) {
      const auto bd = s.params["boundary"];
      const int m = s.measure->components();
      field(s.params, "boundary", [&](const json& b) {
        for (const char* key : {"linear", "quadratic", "constant"}) {
          if (!b.contains(key)) continue;
          const json& v = b.at(key);
          if (!v.is_array() || static_cast<int>(v.size()) != m)
            throw ValidationError("expected one entry per component", key);
        }
        return 0;
      });
      (void)bd;
    }
  }
  if (j.contains("solver")) s.solver = field(j, "solver", [](const json& d) { return SolveConfig::from_json(d); });
  if (j.contains("seed")) {
    s.seed = seed_of(j);
  }
  s.solver.seed = s.seed;
  return s;
}

Batch parse_batch(const json& j) {
  Batch b;
  std::vector<json> items;
  bool has_own_seed = false;
  if (j.is_object() && j.contains("scenarios")) {
    if (j.contains("seed")) {
      b.seed = seed_of(j);
    }
    const json& list = j.at("scenarios");
    if (!list.is_array()) throw ValidationError("expected an array", "scenarios");
    items.assign(list.begin(), list.end());
  } else if (j.is_object()) {
    items.push_back(j);
  } else {
    throw ValidationError("expected a scenario or a batch object", "");
  }
  std::optional<std::uint64_t> env_seed;
  if (const char* env = std::getenv("POTLAB_SEED"); env && *env) {
    try {
      env_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("POTLAB_SEED must be a nonnegative integer", "POTLAB_SEED");
    }
    b.seed = *env_seed;
  }
  std::set<std::string> ids;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const std::string prefix = j.contains("scenarios") ? "scenarios[" + std::to_string(k) + "]" : "";
    try {
      json item = items[k];
      if (item.is_object() && item.contains("builtin")) {
        const std::string id = jf::string(item, "builtin");
        const json* found = find_builtin(id);
        if (!found) throw ValidationError("unknown builtin scenario '" + id + "'", "builtin");
        json merged = *found;
        for (auto it = item.begin(); it != item.end(); ++it)
          if (it.key() != "builtin") merged[it.key()] = it.value();
        item = merged;
      }
      has_own_seed = item.is_object() && item.contains("seed");
      Scenario s = parse_scenario(item);
      if (env_seed || !has_own_seed) {
        s.seed = b.seed;
        s.solver.seed = b.seed;
      }
      if (!ids.insert(s.id).second) throw ValidationError("duplicate scenario id '" + s.id + "'", "id");
      b.scenarios.push_back(std::move(s));
    } catch (const ValidationError& e) {
      if (prefix.empty()) throw;
      throw e.nested(prefix);
    }
  }
  return b;
}

Batch load_batch(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string(), "config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "config");
  }
  return parse_batch(j);
}

VectorField2D boundary_field(std::shared_ptr<const Mesh2D> mesh, int m, const json& d) {
  auto get = [&](const char* key, std::size_t c, int slot) -> double {
    if (!d.is_object() || !d.contains(key)) return 0.0;
    const json& v = d.at(key).at(c);
    if (slot < 0) return v.get<double>();
    return v.at(static_cast<std::size_t>(slot)).get<double>();
  };
  return VectorField2D::interpolate(mesh, m, [&](Point p, std::span<double> out) {
    for (std::size_t c = 0; c < out.size(); ++c)
      out[c] = get("linear", c, 0) * p.x + get("linear", c, 1) * p.y + get("quadratic", c, -1) * (p.x * p.x - p.y * p.y) +
               get("constant", c, -1);
  });
}

namespace {

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ofstream out_;
};

void write_plot(const fs::path& path, const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  std::ofstream out(path);
  write_svg_plot(out, series, opt);
}

json finite_or_string(double x) { return std::isfinite(x) ? json(x) : json(std::isnan(x) ? "nan" : "inf"); }

class Runner {
 public:
  Runner(const Scenario& s, const fs::path& dir) : s_(s), dir_(dir), p_(s.params) {}

  json run() {
    const auto& t = s_.task;
    if (t == "young-audit") young_audit();
    else if (t == "wolff") wolff();
    else if (t == "rearrangement-bound") rearrangement();
    else if (t == "solve") solve();
    else if (t == "sola") sola();
    else if (t == "comparison") comparison();
    else if (t == "excess-decay") excess_decay();
    else if (t == "pointwise") pointwise();
    else if (t == "vmo") vmo();
    else if (t == "campanato") campanato();
    return metrics_;
  }

  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  Point x0() const { return p_.contains("x0") ? point_of(p_, "x0") : s_.domain.center; }
  std::vector<double> radii(std::vector<double> fallback) const { return jf::numbers_or(p_, "radii", std::move(fallback)); }

  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }

  MeasureData load_at(double h) const {
    const double k = jf::number_or(p_, "mollify_h", 0.0);
    if (k <= 0.0) return *s_.measure;
    const auto [lo, hi] = s_.domain.box();
    return mollify(*s_.measure, k * h, lo, hi);
  }

  struct Solved {
    std::shared_ptr<const Mesh2D> mesh;
    MeasureData load;
    SolveResult result;
  };

  Solved solve_at(double h) {
    auto mesh = s_.domain.mesh(h);
    auto load = load_at(h);
    const int m = s_.measure->components();
    std::optional<VectorField2D> boundary;
    if (p_.contains("boundary")) boundary = boundary_field(mesh, m, p_.at("boundary"));
    auto result = solve_dirichlet(s_.operator_spec(), mesh, load, boundary ? &*boundary : nullptr, s_.solver);
    return {mesh, std::move(load), std::move(result)};
  }

  // Single atom at the center of a disk with constant weight and zero data.
  std::optional<RadialReference> radial_reference() const {
    const auto* atoms = std::get_if<std::vector<Atom>>(&s_.measure->kind());
    if (!atoms || atoms->size() != 1 || s_.domain.shape == Domain::Shape::rectangle) return std::nullopt;
    if (!s_.coefficient.is_constant() || p_.contains("boundary")) return std::nullopt;
    if (distance(atoms->front().point, s_.domain.center) > 1e-12) return std::nullopt;
    return RadialReference(*s_.young, s_.measure->total_variation() / s_.coefficient.lower(), s_.domain.radius);
  }

  void write_stages(Csv& csv, double h, const SolveResult& r) {
    for (std::size_t k = 0; k < r.stages.size(); ++k) {
      const auto& st = r.stages[k];
      csv.row(h, k, st.epsilon, st.iterations, st.residual, st.energy, st.converged);
    }
  }

  // Radial comparison for each resolution; returns the relative deviation
  // max |u_h - u_ref| / max u_ref over vertices with r >= 4h.
  double radial_comparison(const RadialReference& ref, const VectorField2D& u, double h, std::size_t index) {
    Csv csv(file("radial_" + std::to_string(index) + ".csv"), "r,u_h,u_ref");
    const auto& mesh = u.mesh();
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) order.emplace_back(distance(mesh.vertices()[v], s_.domain.center), v);
    std::sort(order.begin(), order.end());
    double dev = 0.0, scale = 0.0;
    for (auto [r, v] : order) {
      const double val = norm_value(u, v);
      const double e = ref(r);
      csv.row(r, val, e);
      if (r >= 4.0 * h) {
        dev = std::max(dev, std::abs(val - e));
        scale = std::max(scale, e);
      }
    }
    return scale > 0.0 ? dev / scale : 0.0;
  }

  static double norm_value(const VectorField2D& u, std::size_t v) {
    double s = 0.0;
    for (double x : u.at(v)) s += x * x;
    return std::sqrt(s);
  }

  void young_audit() {
    const auto& G = *s_.young;
    const double t_min = jf::number_or(p_, "t_min", 1e-3), t_max = jf::number_or(p_, "t_max", 1e3);
    const int points = jf::integer_or(p_, "points", 61), pairs = jf::integer_or(p_, "pairs", 10000);
    if (!(t_min > 0.0 && t_max > t_min) || points < 2) throw ValidationError("bad audit range", "params");
    Csv csv(file("young.csv"), "t,G,g,conjugate_at_g,tg_over_G,conjugate_over_G,residual_at_g,roundtrip_error");
    double roundtrip = 0.0, equality = 0.0;
    std::vector<std::pair<double, double>> ratio_curve, conj_curve;
    for (int k = 0; k < points; ++k) {
      const double t = t_min * std::pow(t_max / t_min, static_cast<double>(k) / (points - 1));
      const double Gt = G.value(t), g = G.derivative(t);
      const double conj = G.conjugate(g);
      const auto eq = equivalence_ratios(G, t);
      const double res = young_residual(G, t, g) / (Gt + conj);
      const double rt = std::abs(double_conjugate(G, t) - Gt) / Gt;
      roundtrip = std::max(roundtrip, rt);
      equality = std::max(equality, std::abs(res));
      ratio_curve.emplace_back(t, eq.tg_over_G);
      conj_curve.emplace_back(t, eq.conjugate_over_G);
      csv.row(t, Gt, g, conj, eq.tg_over_G, eq.conjugate_over_G, res, rt);
    }
    std::mt19937_64 rng(s_.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double s_lo = G.derivative(t_min), s_hi = G.derivative(t_max);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < pairs; ++k) {
      const double t = t_min * std::pow(t_max / t_min, unif(rng));
      const double s = s_lo * std::pow(s_hi / s_lo, unif(rng));
      worst = std::min(worst, young_residual(G, t, s) / (G.value(t) + G.conjugate(s)));
    }
    const auto& idx = G.indices();
    metrics_["indices"] = {{"lower", idx.lower}, {"upper", idx.upper}, {"closed_form", idx.closed_form}};
    metrics_["max_roundtrip_error"] = roundtrip;
    metrics_["max_equality_residual"] = equality;
    metrics_["min_relative_residual"] = worst;
    require(roundtrip <= 1e-6, "conjugate round trip above 1e-6");
    require(equality <= 1e-9, "Young equality residual above 1e-9");
    require(worst >= -1e-9, "negative Young residual");
    write_plot(file("indices.svg"), {{"t g / G", ratio_curve}, {"conj(g) / G", conj_curve}},
               {"Growth ratios", "t", "ratio", true, false});
  }

  void wolff() {
    const Point x = x0();
    const auto rs = radii({s_.domain.radius});
    WolffOptions opt;
    opt.levels = jf::integer_or(p_, "levels", opt.levels);
    const int shrink_levels = jf::integer_or(p_, "shrink_levels", 20);
    std::ofstream table(file("wolff.csv"));
    write_wolff_csv_header(table);
    Csv dyadic(file("dyadic.csv"), "R,dyadic_sum,potential");
    Csv shells(file("shells.csv"), "R,k,r_hi,contribution");
    std::vector<std::pair<double, double>> curve;
    json values = json::array();
    for (double R : rs) {
      const auto w = wolff_potential(*s_.young, *s_.measure, x, R, opt);
      write_wolff_csv_row(table, x, R, w);
      const double sum = wolff_dyadic_sum(*s_.young, *s_.measure, x, R, opt.levels);
      dyadic.row(R, sum, w.value);
      for (std::size_t k = 0; k < w.shells.size(); ++k) shells.row(R, k, std::ldexp(R, -static_cast<int>(k)), w.shells[k]);
      values.push_back({{"R", R}, {"value", finite_or_string(w.value)}, {"divergent", w.divergent}, {"dyadic_sum", sum}});
      if (!w.divergent) curve.emplace_back(R, w.value);
    }
    const auto prof = shrink_profile(*s_.young, [&](double r) { return s_.measure->ball_mass(x, r); }, rs.front(), 2,
                                     shrink_levels);
    Csv shrink(file("shrink.csv"), "rho,rho_ginv");
    for (auto [rho, v] : prof) shrink.row(rho, v);
    metrics_["potentials"] = values;
    write_plot(file("potential.svg"), {{"W(x0, R)", curve}}, {"Wolff potential against radius", "R", "W", true, true});
  }

  void rearrangement() {
    const auto [lo, hi] = s_.domain.box();
    const int samples = jf::integer_or(p_, "samples", 20), n = jf::integer_or(p_, "grid", 32),
              bumps = jf::integer_or(p_, "bumps", 3);
    if (samples < 1 || n < 2 || bumps < 1) throw ValidationError("samples, grid and bumps must be positive", "params");
    const Point x = p_.contains("x") ? point_of(p_, "x") : Point{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    const double side = std::min(hi.x - lo.x, hi.y - lo.y);
    const double R = jf::number_or(p_, "R", 0.5 * side);
    std::mt19937_64 rng(s_.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Csv csv(file("bound.csv"), "sample,lhs,rhs,ratio,lhs_divergent,rhs_divergent,inconsistent");
    EstimateReport report("rearrangement-bound");
    int inconsistent = 0;
    for (int k = 0; k < samples; ++k) {
      GridDensity F;
      F.grid = {lo, hi, n, n};
      F.values.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int b = 0; b < bumps; ++b) {
        const Point c{lo.x + unif(rng) * (hi.x - lo.x), lo.y + unif(rng) * (hi.y - lo.y)};
        const double width = side * (0.02 + 0.18 * unif(rng));
        const double amp = 0.5 + 1.5 * unif(rng);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const double d = distance(F.grid.cell_center(i, j), c);
            F.values[static_cast<std::size_t>(j) * n + i] += amp * std::exp(-0.5 * d * d / (width * width));
          }
      }
      const auto b = rearrangement_bound(*s_.young, F, x, R);
      csv.row(k, b.lhs, b.rhs, b.ratio, b.lhs_divergent, b.rhs_divergent, b.inconsistent);
      report.add(k, b.lhs, b.rhs, "random");
      inconsistent += b.inconsistent ? 1 : 0;
    }
    metrics_["report"] = report.summary();
    metrics_["inconsistencies"] = inconsistent;
    require(inconsistent == 0, "rearrangement bound inconsistency");
  }

  void solve() {
    Csv stages(file("stages.csv"), "h,stage,epsilon,iterations,residual,energy,converged");
    auto ref = radial_reference();
    json runs = json::array();
    for (std::size_t k = 0; k < s_.resolutions.size(); ++k) {
      const double h = s_.resolutions[k];
      auto sol = solve_at(h);
      write_stages(stages, h, sol.result);
      std::ofstream field(file("field_" + std::to_string(k) + ".csv"));
      sol.result.solution().write_csv(field);
      json run{{"h", h},
               {"vertices", sol.mesh->num_vertices()},
               {"energy", sol.result.stages.back().energy},
               {"residual", sol.result.stages.back().residual}};
      if (ref) run["radial_deviation"] = radial_comparison(*ref, sol.result.solution(), h, k);
      runs.push_back(run);
    }
    metrics_["runs"] = runs;
  }

  void sola() {
    const double h = s_.resolutions.front();
    std::vector<double> widths = jf::numbers_or(p_, "widths", {});
    if (widths.empty())
      for (double k : jf::numbers_or(p_, "widths_h", {8.0, 4.0, 2.0})) widths.push_back(k * h);
    auto mesh = s_.domain.mesh(h);
    const auto res = sola_loop(s_.operator_spec(), mesh, *s_.measure, widths, s_.solver);
    Csv csv(file("sola.csv"), "width,next_width,distance");
    std::vector<std::pair<double, double>> curve;
    for (std::size_t k = 0; k < res.distances.size(); ++k) {
      csv.row(widths[k], widths[k + 1], res.distances[k]);
      curve.emplace_back(widths[k + 1], res.distances[k]);
    }
    metrics_["distances"] = res.distances;
    metrics_["decreasing"] = res.decreasing;
    write_plot(file("sola.svg"), {{"|D(u_k - u_k+1)|", curve}}, {"SOLA Cauchy profile", "width", "distance", true, true});
  }

  void comparison() {
    const Point x = x0();
    const auto rs = radii({0.5 * s_.domain.radius, 0.25 * s_.domain.radius, 0.125 * s_.domain.radius});
    Csv csv(file("comparison.csv"), "h,r,lhs,excess_term,mass_term");
    EstimateReport report("comparison");
    for (double h : s_.resolutions) {
      auto sol = solve_at(h);
      for (double r : rs) {
        const auto c = aharmonic_comparison(s_.operator_spec(), sol.result.solution(), sol.load, x, r, s_.solver);
        csv.row(h, r, c.lhs, c.excess_term, c.mass_term);
        report.add(r, c.lhs, c.excess_term + c.mass_term, "h=" + format_number(h));
      }
    }
    metrics_["report"] = report.summary();
  }

  void excess_decay() {
    const Point x = x0();
    const double r = jf::number_or(p_, "r", s_.domain.radius);
    const double sigma = jf::number_or(p_, "sigma", 0.25);
    const int levels = jf::integer_or(p_, "levels", 4);
    const double alpha_V = jf::number_or(p_, "alpha_V", 0.5);
    Csv csv(file("excess.csv"), "h,j,r_j,E_j");
    std::vector<PlotSeries> plots;
    json runs = json::array();
    for (double h : s_.resolutions) {
      auto sol = solve_at(h);
      const auto d = excess_decay_run(s_.operator_spec(), sol.result.solution(), sol.load, x, r, sigma, levels, alpha_V);
      PlotSeries series{"h=" + format_number(h), {}};
      for (std::size_t j = 0; j < d.sequence.values.size(); ++j) {
        csv.row(h, j, d.sequence.radii[j], d.sequence.values[j]);
        series.points.emplace_back(d.sequence.radii[j], d.sequence.values[j]);
      }
      plots.push_back(std::move(series));
      runs.push_back({{"h", h},
                      {"levels", d.sequence.values.size()},
                      {"decay_exponent", finite_or_string(d.decay_exponent)},
                      {"alpha_D", d.sequence.alpha_D},
                      {"c_D", finite_or_string(d.c_D)},
                      {"c_E", finite_or_string(d.c_E)},
                      {"report", d.report.summary()},
                      {"warnings", d.warnings}});
    }
    metrics_["runs"] = runs;
    write_plot(file("excess.svg"), plots, {"Excess decay", "r_j", "E_j", true, true});
  }

  void pointwise() {
    const Point x = x0();
    const auto rs = radii({0.5 * s_.domain.radius, 0.25 * s_.domain.radius});
    Csv csv(file("pointwise.csv"), "h,r,wolff,value_lhs,value_rhs,osc_lhs,osc_rhs");
    Csv stages(file("stages.csv"), "h,stage,epsilon,iterations,residual,energy,converged");
    auto ref = radial_reference();
    EstimateReport all("pointwise");
    json per_h = json::array();
    double c_min = std::numeric_limits<double>::infinity(), c_max = 0.0;
    for (std::size_t k = 0; k < s_.resolutions.size(); ++k) {
      const double h = s_.resolutions[k];
      auto sol = solve_at(h);
      write_stages(stages, h, sol.result);
      EstimateReport level("pointwise h=" + format_number(h));
      for (double r : rs) {
        const auto c = pointwise_wolff_check(s_.operator_spec(), sol.result.solution(), *s_.measure, x, r);
        csv.row(h, r, c.wolff, c.value_lhs, c.value_rhs, c.osc_lhs, c.osc_rhs);
        record(level, c, r, "r");
        record(all, c, r, "h=" + format_number(h));
      }
      json entry{{"h", h}, {"fitted_constant", finite_or_string(level.fitted_constant())}};
      if (ref) entry["radial_deviation"] = radial_comparison(*ref, sol.result.solution(), h, k);
      per_h.push_back(entry);
      c_min = std::min(c_min, level.fitted_constant());
      c_max = std::max(c_max, level.fitted_constant());
      require(level.undefined_ratios() == 0, "pointwise ratio undefined at h=" + format_number(h));
    }
    metrics_["report"] = all.summary();
    metrics_["per_resolution"] = per_h;
    metrics_["stability"] = c_min > 0.0 ? finite_or_string(c_max / c_min) : json("undefined");
    require(std::isfinite(all.fitted_constant()), "pointwise constant not finite");
  }

  void vmo() {
    const Point x = x0();
    const auto rs = radii({0.5, 0.25, 0.125, 0.0625});
    const double threshold = jf::number_or(p_, "threshold", 0.25);
    auto sol = solve_at(s_.resolutions.back());
    const auto prof = vmo_profile(sol.result.solution(), x, rs, threshold);
    Csv csv(file("vmo.csv"), "rho,excess");
    std::vector<std::pair<double, double>> curve;
    for (auto [rho, e] : prof.samples) {
      csv.row(rho, e);
      curve.emplace_back(rho, e);
    }
    const auto shrink = shrink_profile(*s_.young, [&](double r) { return sol.load.ball_mass(x, r); }, rs.front(), 2,
                                       static_cast<int>(rs.size()) + 4);
    Csv sh(file("shrink.csv"), "rho,rho_ginv");
    for (auto [rho, v] : shrink) sh.row(rho, v);
    metrics_["vanishing"] = prof.vanishing;
    write_plot(file("vmo.svg"), {{"excess", curve}}, {"Mean oscillation", "rho", "excess", true, true});
  }

  void campanato() {
    const Point x = x0();
    const auto rs = radii({0.25, 0.125, 0.0625, 0.03125});
    auto sol = solve_at(s_.resolutions.back());
    const auto fit = campanato_fit(sol.result.solution(), x, rs);
    Csv csv(file("campanato.csv"), "rho,excess");
    std::vector<std::pair<double, double>> curve;
    for (double r : rs) {
      const double e = potlab::excess(sol.result.solution(), x, r);
      csv.row(r, e);
      curve.emplace_back(r, e);
    }
    metrics_["theta_hat"] = finite_or_string(fit.theta_hat);
    metrics_["c_hat"] = fit.c_hat;
    metrics_["residual"] = fit.residual;
    metrics_["exact_fit"] = fit.exact_fit;
    if (p_.contains("theta")) {
      const double theta = jf::number(p_, "theta");
      const Point centers[] = {x};
      const auto morrey = check_morrey(*s_.measure, *s_.young, theta, rs, centers);
      metrics_["morrey"] = morrey.summary();
    }
    write_plot(file("campanato.svg"), {{"excess", curve}}, {"Campanato fit", "rho", "excess", true, true});
  }

  const Scenario& s_;
  fs::path dir_;
  const json& p_;
  json metrics_ = json::object();
  std::vector<std::string> failures_;
  std::vector<std::string> files_;
};

}  // namespace

Outcome run_scenario(const Scenario& s, const fs::path& dir) {
  fs::create_directories(dir);
  Outcome out;
  out.id = s.id;
  Runner runner(s, dir);
  json metrics;
  try {
    metrics = runner.run();
    if (!runner.failures().empty()) {
      out.ok = false;
      out.diagnostic = runner.failures().front();
    }
  } catch (const ConvergenceError& e) {
    out.ok = false;
    out.diagnostic = std::string(e.what()) + " (residual " + format_number(e.last_residual()) + " after " +
                     std::to_string(e.iterations()) + " iterations)";
  } catch (const std::exception& e) {
    out.ok = false;
    out.diagnostic = e.what();
  }
  out.summary = {{"id", s.id},
                 {"task", s.task},
                 {"description", s.description},
                 {"status", out.ok ? "ok" : "failed"},
                 {"diagnostic", out.diagnostic},
                 {"seed", s.seed},
                 {"metrics", metrics},
                 {"files", runner.files()},
                 {"scenario", s.source}};
  std::ofstream(dir / "summary.json") << out.summary.dump(2) << '\n';
  return out;
}

int run_batch(const Batch& batch, const fs::path& out, int jobs, std::ostream& log) {
  fs::create_directories(out);
  std::vector<Outcome> outcomes(batch.scenarios.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < batch.scenarios.size(); k = next++) {
      const auto& s = batch.scenarios[k];
      const auto start = std::chrono::steady_clock::now();
      outcomes[k] = run_scenario(s, out / s.id);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::lock_guard lock(log_mutex);
      log << (outcomes[k].ok ? "ok     " : "FAILED ") << s.id << " (" << s.task << ", " << std::fixed
          << std::setprecision(2) << secs << " s)";
      if (!outcomes[k].ok) log << ": " << outcomes[k].diagnostic;
      log << '\n';
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(batch.scenarios.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json summary{{"seed", batch.seed}, {"scenarios", json::array()}};
  int status = 0;
  for (const auto& o : outcomes) {
    summary["scenarios"].push_back(o.summary);
    if (!o.ok) status = 1;
  }
  std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
  return status;
}

namespace {

json power(double p) { return {{"family", "power"}, {"p", p}}; }
json zygmund3() { return {{"family", "zygmund"}, {"p", 3.0}, {"alpha", 1.0}}; }
json dirac() {
  return {{"kind", "atoms"}, {"atoms", json::array({{{"point", {0.0, 0.0}}, {"weight", {1.0}}}})}};
}
json uniform_disk() { return {{"kind", "uniform_disk"}, {"center", {0.0, 0.0}}, {"radius", 0.5}, {"mass", 1.0}}; }
// |x|^{-3/2} on the unit disk with unit mass, Morrey-admissible for p = 3, theta = 3/4.
json morrey() {
  return {{"kind", "radial"},
          {"center", {0.0, 0.0}},
          {"coefficient", 1.0 / (4.0 * std::numbers::pi)},
          {"exponent", 1.5},
          {"support", 1.0}};
}
json cosine_a() { return {{"kind", "cosine"}, {"base", 1.5}, {"amplitude", 0.25}, {"frequency", 3.0}}; }
json holder_a() { return {{"kind", "holder"}, {"base", 1.5}, {"amplitude", 0.3}, {"exponent", 0.5}, {"center", {0.2, 0.1}}}; }

CatalogEntry pointwise_entry(const std::string& id, const std::string& what, json young, json measure, json a,
                             bool mollified) {
  json d{{"id", id},
         {"task", "pointwise"},
         {"description", what},
         {"young", std::move(young)},
         {"measure", std::move(measure)},
         {"coefficient", std::move(a)},
         {"resolutions", {1.0 / 16, 1.0 / 32, 1.0 / 64}},
         {"params", {{"radii", {0.5, 0.25, 0.125}}}}};
  if (mollified) d["params"]["mollify_h"] = 2.0;
  return {id, what, d};
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  auto add = [&](const std::string& id, const std::string& what, json d) {
    d["id"] = id;
    d["description"] = what;
    c.push_back({id, what, std::move(d)});
  };
  add("dirac-p3-disk", "Unit Dirac mass at the center of the unit disk, G = t^3: pointwise bound and radial solution",
      {{"task", "pointwise"},
       {"young", power(3.0)},
       {"measure", dirac()},
       {"resolutions", {1.0 / 32, 1.0 / 64}},
       {"params", {{"mollify_h", 2.0}, {"radii", {0.5, 0.25, 0.125}}}}});
  add("wolff-dirac-p3", "Wolff potential of a Dirac mass for G = t^3 (finite)",
      {{"task", "wolff"}, {"young", power(3.0)}, {"measure", dirac()}, {"params", {{"radii", {1.0, 0.5, 0.25}}}}});
  add("wolff-dirac-p2", "Wolff potential of a Dirac mass for G = t^2 (divergent)",
      {{"task", "wolff"}, {"young", power(2.0)}, {"measure", dirac()}, {"params", {{"radii", {1.0}}}}});
  add("young-power-p3", "Conjugate and growth-index audit for G = t^3", {{"task", "young-audit"}, {"young", power(3.0)}});
  add("young-zygmund", "Conjugate and growth-index audit for G = t^3 log(e + t)",
      {{"task", "young-audit"}, {"young", zygmund3()}});
  add("rearrangement-p3", "Random densities against the rearrangement bound for G = t^3",
      {{"task", "rearrangement-bound"},
       {"young", power(3.0)},
       {"domain", {{"shape", "rectangle"}, {"lo", {-1.0, -1.0}}, {"hi", {1.0, 1.0}}}},
       {"params", {{"samples", 20}, {"grid", 32}}}});
  c.push_back(pointwise_entry("pointwise-dirac-p3", "Pointwise bound, Dirac mass, G = t^3, a = 1", power(3.0), dirac(),
                              {{"kind", "constant"}, {"value", 1.0}}, true));
  c.push_back(pointwise_entry("pointwise-dirac-zygmund", "Pointwise bound, Dirac mass, Zygmund growth, cosine weight",
                              zygmund3(), dirac(), cosine_a(), true));
  c.push_back(pointwise_entry("pointwise-uniform-p3", "Pointwise bound, uniform disk load, G = t^3, Hoelder weight",
                              power(3.0), uniform_disk(), holder_a(), false));
  c.push_back(pointwise_entry("pointwise-uniform-zygmund", "Pointwise bound, uniform disk load, Zygmund growth",
                              zygmund3(), uniform_disk(), {{"kind", "constant"}, {"value", 1.0}}, false));
  c.push_back(pointwise_entry("pointwise-morrey-p3", "Pointwise bound, Morrey load |x|^{-3/2}, G = t^3, cosine weight",
                              power(3.0), morrey(), cosine_a(), false));
  c.push_back(pointwise_entry("pointwise-morrey-zygmund", "Pointwise bound, Morrey load |x|^{-3/2}, Zygmund growth",
                              zygmund3(), morrey(), {{"kind", "constant"}, {"value", 1.0}}, false));
  add("excess-decay-harmonic", "Excess decay of a p-harmonic map with quadratic boundary data",
      {{"task", "excess-decay"},
       {"young", power(3.0)},
       {"domain", {{"shape", "graded_disk"}, {"radius", 1.0}, {"inner_radius", 1e-4}, {"sectors", 64}}},
       {"resolutions", {1.0 / 32}},
       {"params", {{"sigma", 0.25}, {"levels", 4}, {"boundary", {{"linear", {{1.0, 0.5}}}, {"quadratic", {1.0}}}}}}});
  add("campanato-dirac-p3", "Campanato exponent near a Dirac mass for G = t^3",
      {{"task", "campanato"},
       {"young", power(3.0)},
       {"measure", dirac()},
       {"resolutions", {1.0 / 64}},
       {"params", {{"mollify_h", 2.0}, {"theta", 0.5}, {"radii", {0.4, 0.2, 0.1, 0.05}}}}});
  add("sola-dirac-p3", "SOLA approximations of a Dirac mass with shrinking mollifiers",
      {{"task", "sola"}, {"young", power(3.0)}, {"measure", dirac()}, {"resolutions", {1.0 / 32}}});
  add("comparison-uniform", "A-harmonic comparison on shrinking balls, uniform disk load",
      {{"task", "comparison"},
       {"young", power(3.0)},
       {"measure", uniform_disk()},
       {"resolutions", {1.0 / 32}},
       {"params", {{"boundary", {{"linear", {{1.0, 0.0}}}}}}}});
  add("vmo-uniform", "Mean oscillation profile with a bounded load",
      {{"task", "vmo"}, {"young", power(3.0)}, {"measure", uniform_disk()}, {"resolutions", {1.0 / 32}}});
  add("linear-p3", "Affine boundary data with no load reproduces the affine map",
      {{"task", "solve"},
       {"young", power(3.0)},
       {"resolutions", {1.0 / 16}},
       {"params", {{"boundary", {{"linear", {{1.0, -2.0}}}, {"constant", {0.5}}}}}}});
  return c;
}

}  // namespace

const std::vector<CatalogEntry>& list_builtin_scenarios() {
  static const std::vector<CatalogEntry> catalog = build_catalog();
  return catalog;
}

}  // namespace potlab::cli
