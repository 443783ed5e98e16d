// One line per criterion: "[PASS] n name (seconds): details". Exit status is
// the number of failing criteria.

#include <Eigen/Sparse>

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "potlab/cli.hpp"
#include "potlab/field.hpp"
#include "potlab/measure.hpp"
#include "potlab/rearrange.hpp"
#include "potlab/solver.hpp"
#include "potlab/verify.hpp"
#include "potlab/wolff.hpp"
#include "potlab/young.hpp"

using namespace potlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

MeasureData dirac(Point p = {0.0, 0.0}) { return MeasureData::atoms({{p, {1.0}}}, 1); }

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome young_algebra() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double idx_err = 0, conj_err = 0, roundtrip = 0, worst = 0, equality = 0;
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    const auto G = YoungFunction::power_law(p);
    idx_err = std::max({idx_err, std::abs(G.indices().lower - p), std::abs(G.indices().upper - p)});
    for (int k = 0; k <= 60; ++k) {
      const double t = 1e-3 * std::pow(1e6, k / 60.0);
      const double s = p * std::pow(t, p - 1);
      // Legendre transform of t^p: (p - 1) (s/p)^{p/(p-1)}.
      const double exact = (p - 1) * std::pow(s / p, p / (p - 1));
      conj_err = std::max(conj_err, std::abs(G.conjugate(s) - exact) / exact);
      roundtrip = std::max(roundtrip, std::abs(double_conjugate(G, t) - G.value(t)) / G.value(t));
      equality = std::max(equality, std::abs(young_residual(G, t, s)) / (G.value(t) + exact));
    }
    for (int k = 0; k < 10000; ++k) {
      const double t = 1e-3 * std::pow(1e6, unif(rng));
      const double s = G.derivative(1e-3) * std::pow(G.derivative(1e3) / G.derivative(1e-3), unif(rng));
      worst = std::min(worst, young_residual(G, t, s) / (G.value(t) + G.conjugate(s)));
    }
  }
  const bool ok = idx_err <= 1e-6 && roundtrip <= 1e-6 && conj_err <= 1e-9 && worst >= -1e-9 && equality <= 1e-9;
  return {ok, "index error " + fmt("%.2e", idx_err) + ", round trip " + fmt("%.2e", roundtrip) + ", conjugate " +
                  fmt("%.2e", conj_err) + ", min residual " + fmt("%.2e", worst) + ", equality " +
                  fmt("%.2e", equality)};
}

Outcome wolff_closed_form() {
  const double oracle = 2.0 / std::sqrt(3.0);
  const auto G3 = YoungFunction::power_law(3.0);
  const auto w = wolff_potential(G3, dirac(), {0.0, 0.0}, 1.0);
  // Same potential through the generic shell quadrature.
  const auto generic = wolff_potential(G3, [](double) { return 1.0; }, 1.0, 2);
  const auto w2 = wolff_potential(YoungFunction::power_law(2.0), dirac(), {0.0, 0.0}, 1.0);
  const bool ok = !w.divergent && std::abs(w.value - oracle) <= 1e-6 && std::abs(generic.value - oracle) <= 1e-6 &&
                  w2.divergent;
  return {ok, "W = " + fmt("%.10f", w.value) + ", shell quadrature " + fmt("%.10f", generic.value) + ", oracle " +
                  fmt("%.10f", oracle) + ", p = 2 divergent " + (w2.divergent ? "yes" : "no")};
}

Outcome radial_agreement() {
  const auto G = YoungFunction::power_law(3.0);
  OperatorSpec spec{G, CoefficientField::constant(1.0), 2, 1};
  // u(r) = int_r^1 (1 / (6 pi s))^{1/2} ds for g(t) = 3 t^2 and unit mass.
  auto exact = [](double r) { return 2.0 / std::sqrt(6.0 * std::numbers::pi) * (1.0 - std::sqrt(r)); };
  std::vector<double> devs;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    auto mesh = std::make_shared<const Mesh2D>(Mesh2D::disk({0.0, 0.0}, 1.0, h));
    const auto load = mollify(dirac(), 2.0 * h, {-1.0, -1.0}, {1.0, 1.0});
    const auto res = solve_dirichlet(spec, mesh, load, nullptr, SolveConfig{});
    const auto& u = res.solution();
    double dev = 0, scale = 0;
    for (std::size_t v = 0; v < mesh->num_vertices(); ++v) {
      const double r = std::hypot(mesh->vertices()[v].x, mesh->vertices()[v].y);
      if (r < 4.0 * h) continue;
      dev = std::max(dev, std::abs(u.at(v)[0] - exact(r)));
      scale = std::max(scale, exact(r));
    }
    devs.push_back(dev / scale);
  }
  const bool ok = devs[1] < devs[0] && devs[2] < devs[1] && devs[2] <= 0.05;
  return {ok, "relative deviation " + fmt("%.3e", devs[0]) + " / " + fmt("%.3e", devs[1]) + " / " +
                  fmt("%.3e", devs[2]) + " at h = 1/32, 1/64, 1/128"};
}

Outcome linear_oracle() {
  const double h = 1.0 / 64;
  auto mesh = std::make_shared<const Mesh2D>(Mesh2D::disk({0.0, 0.0}, 1.0, h));
  const auto G = YoungFunction::scaled(YoungFunction::power_law(2.0), 0.5);
  OperatorSpec spec{G, CoefficientField::constant(1.0), 2, 1};
  const std::vector<Atom> atoms{{{0.3, 0.2}, {1.0}}, {{-0.4, -0.1}, {-0.5}}};
  auto data = [](Point p) { return 0.5 * p.x - p.y + (p.x * p.x - p.y * p.y); };
  const auto boundary = VectorField2D::interpolate(mesh, 1, [&](Point p, std::span<double> o) { o[0] = data(p); });
  const auto res = solve_dirichlet(spec, mesh, MeasureData::atoms(atoms, 1), &boundary, SolveConfig{});

  // Independent P1 Laplace assembly.
  const auto n = static_cast<int>(mesh->num_vertices());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (const auto& tri : mesh->triangles()) {
    const Point p[3] = {mesh->vertices()[tri[0]], mesh->vertices()[tri[1]], mesh->vertices()[tri[2]]};
    const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    const double area = 0.5 * std::abs(det);
    double gx[3], gy[3];
    for (int i = 0; i < 3; ++i) {
      const Point& a = p[(i + 1) % 3];
      const Point& c = p[(i + 2) % 3];
      gx[i] = (a.y - c.y) / det;
      gy[i] = (c.x - a.x) / det;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], area * (gx[i] * gx[j] + gy[i] * gy[j]));
  }
  for (const auto& atom : atoms) {
    for (const auto& tri : mesh->triangles()) {
      const Point p[3] = {mesh->vertices()[tri[0]], mesh->vertices()[tri[1]], mesh->vertices()[tri[2]]};
      const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
      const double l1 = ((atom.point.x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (atom.point.y - p[0].y)) / det;
      const double l2 = ((p[1].x - p[0].x) * (atom.point.y - p[0].y) - (atom.point.x - p[0].x) * (p[1].y - p[0].y)) / det;
      const double l0 = 1.0 - l1 - l2;
      if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
      b[tri[0]] += l0 * atom.weight[0];
      b[tri[1]] += l1 * atom.weight[0];
      b[tri[2]] += l2 * atom.weight[0];
      break;
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  // Eliminate Dirichlet rows symmetrically.
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < n; ++v)
    if (mesh->is_boundary(v)) g[v] = data(mesh->vertices()[v]);
  Eigen::VectorXd rhs = b - K * g;
  std::vector<Eigen::Triplet<double>> reduced;
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      const bool bi = mesh->is_boundary(it.row()), bj = mesh->is_boundary(it.col());
      if (!bi && !bj) reduced.emplace_back(it.row(), it.col(), it.value());
    }
  for (int v = 0; v < n; ++v)
    if (mesh->is_boundary(v)) {
      reduced.emplace_back(v, v, 1.0);
      rhs[v] = g[v];
    }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(reduced.begin(), reduced.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  const Eigen::VectorXd ref = lu.solve(rhs);
  double err = 0.0;
  for (int v = 0; v < n; ++v) err = std::max(err, std::abs(ref[v] - res.solution().at(v)[0]));
  return {err <= 1e-8, "max-norm difference " + fmt("%.3e", err) + " on " + std::to_string(n) + " vertices"};
}

Outcome pointwise_family() {
  const auto catalog = cli::list_builtin_scenarios();
  std::ostringstream detail;
  bool ok = true;
  int count = 0, nonconstant = 0;
  double family_c = 0.0;
  for (const auto& entry : catalog) {
    if (entry.id.rfind("pointwise-", 0) != 0) continue;
    const auto s = cli::parse_scenario(entry.descriptor);
    ++count;
    if (!s.coefficient.is_constant()) ++nonconstant;
    const double k = s.params.value("mollify_h", 0.0);
    const auto radii = s.params.at("radii").get<std::vector<double>>();
    std::vector<double> per_h;
    for (double h : s.resolutions) {
      auto mesh = s.domain.mesh(h);
      const auto load = k > 0.0 ? mollify(*s.measure, k * h, {-1.0, -1.0}, {1.0, 1.0}) : *s.measure;
      const auto res = solve_dirichlet(s.operator_spec(), mesh, load, nullptr, s.solver);
      double c = 0.0;
      for (double r : radii) {
        const auto chk = pointwise_wolff_check(s.operator_spec(), res.solution(), *s.measure, {0.0, 0.0}, r);
        double u0[1];
        res.solution().evaluate({0.0, 0.0}, u0);
        if (std::abs(std::abs(u0[0]) - chk.value_lhs) > 1e-12 || !(chk.value_rhs > 0.0)) ok = false;
        c = std::max(c, chk.value_lhs / chk.value_rhs);
      }
      per_h.push_back(c);
      family_c = std::max(family_c, c);
    }
    double spread = 1.0;
    for (std::size_t i = 1; i < per_h.size(); ++i)
      spread = std::max(spread, std::max(per_h[i] / per_h[i - 1], per_h[i - 1] / per_h[i]));
    if (!(spread <= 2.0) || !std::isfinite(spread)) ok = false;
    detail << entry.id.substr(10) << " C " << fmt("%.3f", per_h.back()) << " x" << fmt("%.3f", spread) << "; ";
  }
  ok = ok && count >= 6 && nonconstant >= 2 && std::isfinite(family_c);
  return {ok, std::to_string(count) + " scenarios (" + std::to_string(nonconstant) + " with variable a), C = " +
                  fmt("%.4f", family_c) + "; " + detail.str()};
}

Outcome excess_decay() {
  const auto G = YoungFunction::power_law(3.0);
  OperatorSpec spec{G, CoefficientField::constant(1.0), 2, 1};
  auto mesh = std::make_shared<const Mesh2D>(Mesh2D::graded_disk({0.0, 0.0}, 1.0, 1.0 / 32, 1e-4, 64));
  const auto boundary = VectorField2D::interpolate(
      mesh, 1, [](Point p, std::span<double> o) { o[0] = p.x + 0.5 * p.y + (p.x * p.x - p.y * p.y); });
  const auto zero = MeasureData::zero(1);
  const auto res = solve_dirichlet(spec, mesh, zero, &boundary, SolveConfig{});
  const double sigma = 0.25;
  std::vector<double> r, e;
  for (int j = 0; j <= 4; ++j) {
    const double rj = std::pow(sigma, j + 1);
    r.push_back(rj);
    e.push_back(excess(res.solution(), {0.0, 0.0}, rj));
  }
  const double slope = loglog_slope(r, e);
  const auto run = excess_decay_run(spec, res.solution(), zero, {0.0, 0.0}, 1.0, sigma, 4);
  const int levels = static_cast<int>(run.sequence.values.size()) - 1;
  const bool ok = levels >= 4 && slope >= 0.75 - 0.15 && std::abs(run.decay_exponent - slope) < 1e-9;
  return {ok, "decay exponent " + fmt("%.4f", slope) + " over J = " + std::to_string(levels) +
                  " levels (threshold 0.60), c_D = " + fmt("%.3f", run.c_D)};
}

Outcome campanato() {
  const double h = 1.0 / 128;
  const auto G = YoungFunction::power_law(3.0);
  OperatorSpec spec{G, CoefficientField::constant(1.0), 2, 1};
  const auto mu = dirac();
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  const Point center[] = {{0.0, 0.0}};
  const auto morrey = check_morrey(mu, G, 0.5, radii, center);
  auto mesh = std::make_shared<const Mesh2D>(Mesh2D::disk({0.0, 0.0}, 1.0, h));
  const auto res = solve_dirichlet(spec, mesh, mollify(mu, 2.0 * h, {-1.0, -1.0}, {1.0, 1.0}), nullptr, SolveConfig{});
  std::vector<double> e;
  for (double r : radii) e.push_back(excess(res.solution(), {0.0, 0.0}, r));
  const double theta = loglog_slope(radii, e);
  const auto fit = campanato_fit(res.solution(), {0.0, 0.0}, radii);
  const bool ok = theta >= 0.4 && std::abs(fit.theta_hat - theta) < 1e-9 && morrey.verdict() == Verdict::bounded;
  return {ok, "theta_hat " + fmt("%.4f", theta) + " over radii 0.4..0.05 at h = 1/128, Morrey constant " +
                  fmt("%.4f", morrey.fitted_constant())};
}

Outcome rearrangement() {
  const auto G = YoungFunction::power_law(3.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 32;
  double c_fit = 0.0;
  int flagged = 0, nonfinite = 0;
  std::vector<double> ratios;
  for (int k = 0; k < 24; ++k) {
    GridDensity F;
    F.grid = {{-1.0, -1.0}, {1.0, 1.0}, n, n};
    F.values.assign(n * n, 0.0);
    for (int b = 0; b < 3; ++b) {
      const Point c{-1.0 + 2.0 * unif(rng), -1.0 + 2.0 * unif(rng)};
      const double w = 0.05 + 0.3 * unif(rng), amp = 0.5 + 2.0 * unif(rng);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double d = distance(F.grid.cell_center(i, j), c);
          F.values[j * n + i] += amp * std::exp(-0.5 * d * d / (w * w));
        }
    }
    const auto bnd = rearrangement_bound(G, F, {0.0, 0.0}, 1.0);
    flagged += bnd.inconsistent ? 1 : 0;
    if (!std::isfinite(bnd.ratio)) ++nonfinite;
    ratios.push_back(bnd.lhs / bnd.rhs);
    c_fit = std::max(c_fit, bnd.lhs / bnd.rhs);
  }
  int violated = 0;
  for (double q : ratios)
    if (q > c_fit) ++violated;
  const auto indicator = decreasing_rearrangement(std::vector<double>{1.0}, std::vector<double>{1.0});
  const auto lz = lorentz_integral(indicator, {2.0, 1.0});
  const bool ok = flagged == 0 && nonfinite == 0 && violated == 0 && !lz.divergent && std::abs(lz.value - 4.0) <= 1e-6;
  return {ok, "24 densities, c_fit = " + fmt("%.4f", c_fit) + ", inconsistencies " + std::to_string(flagged) +
                  ", Lorentz indicator " + fmt("%.10f", lz.value)};
}

Outcome monotonicity() {
  std::ostringstream detail;
  bool ok = true;
  const std::pair<const char*, YoungFunction> families[] = {{"t^2", YoungFunction::power_law(2.0)},
                                                            {"t^3", YoungFunction::power_law(3.0)},
                                                            {"Zygmund(2,1)", YoungFunction::zygmund(2.0, 1.0)}};
  for (const auto& [name, G] : families) {
    const auto b = sample_monotonicity({G, CoefficientField::constant(1.0), 2, 1}, 100000, 3);
    const double width = b.lhs_over_vgap.max / b.lhs_over_vgap.min;
    const bool this_ok = b.min_lhs >= 0.0 && b.lhs_over_vgap.min > 0.0 && width <= 50.0;
    ok = ok && this_ok;
    detail << name << " [" << fmt("%.4f", b.lhs_over_vgap.min) << ", " << fmt("%.4f", b.lhs_over_vgap.max)
           << "] width " << fmt("%.3f", width) << "; ";
  }
  return {ok, detail.str()};
}

Outcome identities() {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double jac_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 3;
    std::vector<double> xi(m), plus(m), minus(m), tp(m), tm(m), jac(m * m);
    for (double& x : xi) x = 3.0 * normal(rng);
    const double k = 0.5 + 3.0 * unif(rng);
    const double norm = std::sqrt(std::inner_product(xi.begin(), xi.end(), xi.begin(), 0.0));
    if (std::abs(norm - k) < 1e-3) continue;
    truncate_jacobian(xi, k, jac);
    const double step = 1e-6;
    for (int j = 0; j < m; ++j) {
      plus = xi;
      minus = xi;
      plus[j] += step;
      minus[j] -= step;
      truncate(plus, k, tp);
      truncate(minus, k, tm);
      for (int i = 0; i < m; ++i) jac_err = std::max(jac_err, std::abs((tp[i] - tm[i]) / (2 * step) - jac[i * m + j]));
    }
  }

  double cav_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> omega(400), f(400);
    for (auto& w : omega) w = 0.1 + unif(rng);
    for (auto& v : f) v = 5.0 * unif(rng) * unif(rng);
    const double gamma = 0.2 + unif(rng);
    const auto c = cavalieri_identity(omega, f, 0.01, gamma);
    // Right-hand side computed directly.
    double rhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) rhs += 0.01 * omega[i] / std::pow(1.0 + f[i], 1.0 + gamma);
    rhs /= 1.0 + gamma;
    cav_err = std::max({cav_err, c.relative_error(), std::abs(c.rhs - rhs) / rhs});
  }

  auto mesh = std::make_shared<const Mesh2D>(Mesh2D::disk({0.0, 0.0}, 1.0, 1.0 / 8));
  double shift_err = 0.0, scale_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + trial % 3;
    std::vector<double> vals(mesh->num_vertices() * m);
    for (auto& v : vals) v = normal(rng);
    VectorField2D u(mesh, m, vals);
    const Point x0{0.4 * (unif(rng) - 0.5), 0.4 * (unif(rng) - 0.5)};
    const double r = 0.3 + 0.4 * unif(rng);
    const double e = excess(u, x0, r);
    std::vector<double> c(m);
    for (auto& x : c) x = 10.0 * normal(rng);
    const double lambda = 20.0 * (unif(rng) - 0.5);
    auto shifted = vals, scaled = vals;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      shifted[i] += c[i % m];
      scaled[i] *= lambda;
    }
    shift_err = std::max(shift_err, std::abs(excess(VectorField2D(mesh, m, shifted), x0, r) - e) / e);
    scale_err = std::max(scale_err, std::abs(excess(VectorField2D(mesh, m, scaled), x0, r) - std::abs(lambda) * e) /
                                        (std::abs(lambda) * e));
  }
  // Invariances hold up to floating-point rounding of the averages.
  const bool ok = jac_err <= 1e-6 && cav_err <= 1e-6 && shift_err <= 1e-12 && scale_err <= 1e-12;
  return {ok, "Jacobian " + fmt("%.2e", jac_err) + ", Cavalieri " + fmt("%.2e", cav_err) + ", shift " +
                  fmt("%.2e", shift_err) + ", homogeneity " + fmt("%.2e", scale_err) + " over 1000 fields"};
}

std::vector<std::string> csv_files(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), root).string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path config = fs::path(POTLAB_SOURCE_DIR) / "scenarios" / "bundled.json";
  const fs::path root = fs::temp_directory_path() / ("potlab-determinism-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const auto batch = cli::load_batch(config);
  std::ostringstream log;
  const int s1 = cli::run_batch(batch, root / "a", 1, log);
  const int s2 = cli::run_batch(batch, root / "b", 2, log);
  const auto fa = csv_files(root / "a"), fb = csv_files(root / "b");
  int differing = 0;
  for (const auto& f : fa)
    if (slurp(root / "a" / f) != slurp(root / "b" / f)) ++differing;
  fs::remove_all(root);
  const bool ok = s1 == 0 && s2 == 0 && fa == fb && !fa.empty() && differing == 0;
  return {ok, std::to_string(batch.scenarios.size()) + " scenarios, " + std::to_string(fa.size()) + " CSV files, " +
                  std::to_string(differing) + " differ (exit " + std::to_string(s1) + "/" + std::to_string(s2) + ")"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds, 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Young algebra exactness", 5.0, young_algebra},
      {2, "Wolff closed form", 1.0, wolff_closed_form},
      {3, "Radial agreement", 300.0, radial_agreement},
      {4, "Linear-case oracle", 30.0, linear_oracle},
      {5, "Pointwise estimate family", 0.0, pointwise_family},
      {6, "Excess decay", 0.0, excess_decay},
      {7, "Campanato exponent", 0.0, campanato},
      {8, "Rearrangement bound", 0.0, rearrangement},
      {9, "Monotonicity bands", 0.0, monotonicity},
      {10, "Numeric identities", 30.0, identities},
      {11, "Determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget > 0.0 && secs > c.budget) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.budget) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << " (" << fmt("%.2f", secs)
              << " s): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures;
}
