#include "potlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "potlab/error.hpp"
#include "potlab/json_fields.hpp"
#include "potlab/quadrature.hpp"
#include "potlab/verify.hpp"

namespace potlab {

namespace jf = json_fields;
using nlohmann::json;

const char* to_string(StepRule rule) {
  switch (rule) {
    case StepRule::fixed:
      return "fixed";
    case StepRule::adaptive_curvature:
      return "adaptive-curvature";
    case StepRule::newton:
      return "newton";
  }
  return "newton";
}

SolveConfig SolveConfig::from_json(const json& j) {
  SolveConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ValidationError("expected an object", "");
  c.epsilon = jf::number_or(j, "epsilon", c.epsilon);
  c.epsilon_start = jf::number_or(j, "epsilon_start", c.epsilon_start);
  c.epsilon_factor = jf::number_or(j, "epsilon_factor", c.epsilon_factor);
  c.max_iter = jf::integer_or(j, "max_iter", c.max_iter);
  c.tol = jf::number_or(j, "tol", c.tol);
  c.fixed_step = jf::number_or(j, "fixed_step", c.fixed_step);
  c.initial_noise = jf::number_or(j, "initial_noise", c.initial_noise);
  if (j.contains("polish")) {
    if (!j["polish"].is_boolean()) throw ValidationError("expected a boolean", "polish");
    c.polish = j["polish"].get<bool>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ValidationError("expected a nonnegative integer", "seed");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  const std::string step = jf::string_or(j, "step", "newton");
  if (step == "newton")
    c.step = StepRule::newton;
  else if (step == "adaptive-curvature")
    c.step = StepRule::adaptive_curvature;
  else if (step == "fixed")
    c.step = StepRule::fixed;
  else
    throw ValidationError("unknown step rule '" + step + "'", "step");
  if (!(c.tol > 0.0)) throw ValidationError("tolerance must be positive", "tol");
  if (c.max_iter < 1) throw ValidationError("max_iter must be positive", "max_iter");
  if (!(c.epsilon_factor > 0.0 && c.epsilon_factor < 1.0))
    throw ValidationError("epsilon_factor must lie in (0, 1)", "epsilon_factor");
  if (!(c.fixed_step > 0.0)) throw ValidationError("step length must be positive", "fixed_step");
  return c;
}

json SolveConfig::to_json() const {
  return {{"epsilon", epsilon},       {"epsilon_start", epsilon_start}, {"epsilon_factor", epsilon_factor},
          {"max_iter", max_iter},     {"tol", tol},                     {"step", potlab::to_string(step)},
          {"fixed_step", fixed_step}, {"polish", polish},               {"initial_noise", initial_noise},
          {"seed", seed}};
}

double NodalLoad::total_abs() const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return s;
}

std::pair<Point, Point> bounding_box(const Mesh2D& mesh) {
  Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point hi{-lo.x, -lo.y};
  for (const Point& p : mesh.vertices()) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  return {lo, hi};
}

namespace {

void deposit(const Mesh2D& mesh, int t, const std::array<double, 3>& bary, const double* mass, int m,
             std::vector<double>& out) {
  const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
  for (int k = 0; k < 3; ++k) {
    double* b = out.data() + static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]) * m;
    for (int c = 0; c < m; ++c) b[c] += bary[static_cast<std::size_t>(k)] * mass[c];
  }
}

}  // namespace

NodalLoad assemble_load(const Mesh2D& mesh, const MeasureData& load) {
  NodalLoad out;
  const int m = load.components();
  out.components = m;
  out.values.assign(mesh.num_vertices() * static_cast<std::size_t>(m), 0.0);
  if (const auto* atoms = std::get_if<std::vector<Atom>>(&load.kind())) {
    for (const auto& a : *atoms) {
      const int t = mesh.locate(a.point);
      if (t < 0) continue;
      deposit(mesh, t, mesh.barycentric(static_cast<std::size_t>(t), a.point), a.weight.data(), m, out.values);
    }
  } else if (const auto* g = std::get_if<GridDensity>(&load.kind())) {
    const auto& s = g->grid;
    const int sub = std::clamp(static_cast<int>(std::ceil(2.0 * std::max(s.dx(), s.dy()) / mesh.resolution())), 1, 16);
    const double w = s.cell_area() / (sub * sub);
    std::vector<double> mass(static_cast<std::size_t>(m));
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        const double* v = g->values.data() + (static_cast<std::size_t>(j) * s.nx + i) * m;
        bool nonzero = false;
        for (int c = 0; c < m; ++c) {
          mass[static_cast<std::size_t>(c)] = v[c] * w;
          nonzero = nonzero || v[c] != 0.0;
        }
        if (!nonzero) continue;
        for (int b = 0; b < sub; ++b) {
          for (int a = 0; a < sub; ++a) {
            const Point p{s.lo.x + (i + (a + 0.5) / sub) * s.dx(), s.lo.y + (j + (b + 0.5) / sub) * s.dy()};
            const int t = mesh.locate(p);
            if (t < 0) continue;
            deposit(mesh, t, mesh.barycentric(static_cast<std::size_t>(t), p), mass.data(), m, out.values);
          }
        }
      }
    }
  } else {
    // Radial densities: 64 subtriangle centroids per triangle, then the total
    // is renormalised to the exact mass when the support lies inside the mesh.
    const auto& p = std::get<RadialProfile>(load.kind());
    const double dn = p.direction_norm();
    if (dn == 0.0 || p.coefficient == 0.0) return out;
    const int level = 3;
    const int n = 1 << level;
    std::vector<double> mass(static_cast<std::size_t>(m));
    double sampled = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      const Point* v[3] = {&mesh.vertices()[static_cast<std::size_t>(tri[0])],
                           &mesh.vertices()[static_cast<std::size_t>(tri[1])],
                           &mesh.vertices()[static_cast<std::size_t>(tri[2])]};
      const double nearest = std::min({distance(*v[0], p.center), distance(*v[1], p.center), distance(*v[2], p.center)});
      const double diameter = std::max({distance(*v[0], *v[1]), distance(*v[1], *v[2]), distance(*v[2], *v[0])});
      if (nearest - diameter >= p.support) continue;
      const double w = mesh.area(t) / (n * n);
      // Regular subdivision: upward cells (i, j) and downward cells.
      for (int i = 0; i < n; ++i) {
        for (int j = 0; i + j < n; ++j) {
          for (int down = 0; down < 2; ++down) {
            if (down && i + j + 1 >= n) continue;
            std::array<double, 3> bary;
            if (!down) {
              bary = {(i + 1.0 / 3.0) / n, (j + 1.0 / 3.0) / n, 0.0};
            } else {
              bary = {(i + 2.0 / 3.0) / n, (j + 2.0 / 3.0) / n, 0.0};
            }
            bary[2] = 1.0 - bary[0] - bary[1];
            const Point x{bary[0] * v[0]->x + bary[1] * v[1]->x + bary[2] * v[2]->x,
                          bary[0] * v[0]->y + bary[1] * v[1]->y + bary[2] * v[2]->y};
            const double dens = p.magnitude(distance(x, p.center));
            if (dens == 0.0) continue;
            sampled += dens * w;
            for (int c = 0; c < m; ++c) mass[static_cast<std::size_t>(c)] = dens * w * p.direction[static_cast<std::size_t>(c)] / dn;
            deposit(mesh, static_cast<int>(t), bary, mass.data(), m, out.values);
          }
        }
      }
    }
    bool inside = true;
    for (int k = 0; k < 64 && inside; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / 64;
      inside = mesh.locate({p.center.x + p.support * std::cos(phi), p.center.y + p.support * std::sin(phi)}) >= 0;
    }
    if (inside && sampled > 0.0) {
      const double scale = load.total_variation() / sampled;
      for (double& b : out.values) b *= scale;
    }
  }
  return out;
}

namespace {

// Energy, gradient and Hessian of the discrete functional over the free dofs.
class Discretization {
 public:
  Discretization(const OperatorSpec& spec, const Mesh2D& mesh, const NodalLoad& load)
      : spec_(spec), mesh_(mesh), load_(load), m_(load.components) {
    weights_.resize(mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) weights_[t] = mesh.area(t) * spec.a(mesh.centroid(t));
    g_eps_ = 0.0;
  }

  void set_epsilon(double eps) {
    eps_ = eps;
    g_eps_ = eps > 0.0 ? spec_.G.value(eps) : 0.0;
  }
  double epsilon() const { return eps_; }

  // Du on triangle t into xi[2c + d].
  void grad(std::span<const double> u, std::size_t t, double* xi) const {
    const auto& tri = mesh_.triangles()[t];
    const auto& gr = mesh_.basis_gradients(t);
    for (int c = 0; c < m_; ++c) {
      double gx = 0.0, gy = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double val = u[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]) * m_ + c];
        gx += val * gr[static_cast<std::size_t>(k)].x;
        gy += val * gr[static_cast<std::size_t>(k)].y;
      }
      xi[2 * c] = gx;
      xi[2 * c + 1] = gy;
    }
  }

  double norm2(const double* xi) const {
    double s = 0.0;
    for (int i = 0; i < 2 * m_; ++i) s += xi[i] * xi[i];
    return s;
  }

  double energy(std::span<const double> u) const {
    double e = 0.0;
    double xi[32];
    for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) {
      grad(u, t, xi);
      const double tau = std::sqrt(norm2(xi) + eps_ * eps_);
      e += weights_[t] * (spec_.G.value(tau) - g_eps_);
    }
    for (std::size_t i = 0; i < u.size(); ++i) e -= load_.values[i] * u[i];
    return e;
  }

  void gradient(std::span<const double> u, std::vector<double>& out) const {
    out.assign(u.size(), 0.0);
    double xi[32];
    for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) {
      grad(u, t, xi);
      const double tau = std::sqrt(norm2(xi) + eps_ * eps_);
      const double w = weights_[t] * diffusivity(spec_.G, tau);
      if (w == 0.0) continue;
      const auto& tri = mesh_.triangles()[t];
      const auto& gr = mesh_.basis_gradients(t);
      for (int k = 0; k < 3; ++k) {
        double* o = out.data() + static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]) * m_;
        for (int c = 0; c < m_; ++c)
          o[c] += w * (xi[2 * c] * gr[static_cast<std::size_t>(k)].x + xi[2 * c + 1] * gr[static_cast<std::size_t>(k)].y);
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) out[i] -= load_.values[i];
  }

  // Triplets of the Hessian restricted to free dofs (index -1 = fixed).
  void hessian(std::span<const double> u, const std::vector<int>& dof, std::vector<Eigen::Triplet<double>>& trip) const {
    trip.clear();
    double xi[32];
    double proj[3][16];
    for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) {
      grad(u, t, xi);
      const double r2 = norm2(xi);
      const double tau = std::sqrt(r2 + eps_ * eps_);
      // Entries are emitted even when zero so the sparsity pattern, and with
      // it the symbolic factorisation, stays fixed across iterations.
      const double g = tau > 0.0 ? spec_.G.derivative(tau) : 0.0;
      const double w = tau > 0.0 ? weights_[t] * g / tau : 0.0;
      const double w2 = r2 > 0.0 ? weights_[t] * (spec_.G.second_derivative(tau) / (tau * tau) - g / (tau * tau * tau)) : 0.0;
      const auto& tri = mesh_.triangles()[t];
      const auto& gr = mesh_.basis_gradients(t);
      for (int k = 0; k < 3; ++k)
        for (int c = 0; c < m_; ++c)
          proj[k][c] = xi[2 * c] * gr[static_cast<std::size_t>(k)].x + xi[2 * c + 1] * gr[static_cast<std::size_t>(k)].y;
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          const double dot = gr[static_cast<std::size_t>(k)].x * gr[static_cast<std::size_t>(l)].x +
                             gr[static_cast<std::size_t>(k)].y * gr[static_cast<std::size_t>(l)].y;
          for (int c = 0; c < m_; ++c) {
            const int row = dof[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]) * m_ + c];
            if (row < 0) continue;
            for (int e = 0; e < m_; ++e) {
              const int col = dof[static_cast<std::size_t>(tri[static_cast<std::size_t>(l)]) * m_ + e];
              if (col < 0) continue;
              double v = w2 * proj[k][c] * proj[l][e];
              if (c == e) v += w * dot;
              trip.emplace_back(row, col, v);
            }
          }
        }
      }
    }
  }

 private:
  const OperatorSpec& spec_;
  const Mesh2D& mesh_;
  const NodalLoad& load_;
  int m_;
  std::vector<double> weights_;
  double eps_ = 0.0;
  double g_eps_ = 0.0;
};

double free_max(const std::vector<double>& g, const std::vector<int>& dof) {
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (dof[i] >= 0) r = std::max(r, std::abs(g[i]));
  return r;
}

// One continuation stage; returns the report and appends accepted energies.
StageReport minimise(const Discretization& disc, std::vector<double>& u, const std::vector<int>& dof, int nfree,
                     const SolveConfig& cfg, double tolerance, std::vector<double>& history) {
  StageReport rep;
  rep.epsilon = disc.epsilon();
  std::vector<double> grad, trial(u.size()), dir(u.size(), 0.0), prev_u, prev_g;
  double e = disc.energy(u);
  disc.gradient(u, grad);
  double res = free_max(grad, dof);
  double step = cfg.fixed_step;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseMatrix<double> H(nfree, nfree);
  std::vector<Eigen::Triplet<double>> trip;
  bool analysed = false;

  int it = 0;
  for (; it < cfg.max_iter && res > tolerance; ++it) {
    double slope = 0.0;
    if (cfg.step == StepRule::newton) {
      disc.hessian(u, dof, trip);
      H.setFromTriplets(trip.begin(), trip.end());
      // Keep the factorisation definite where the energy is flat.
      double diag_max = 0.0;
      for (int i = 0; i < nfree; ++i) diag_max = std::max(diag_max, H.coeff(i, i));
      const double shift = std::max(1e-14 * diag_max, 1e-300);
      for (int i = 0; i < nfree; ++i) H.coeffRef(i, i) += shift;
      if (!analysed) {
        ldlt.analyzePattern(H);
        analysed = true;
      }
      ldlt.factorize(H);
      Eigen::VectorXd rhs(nfree);
      for (std::size_t i = 0; i < u.size(); ++i)
        if (dof[i] >= 0) rhs[dof[i]] = -grad[i];
      Eigen::VectorXd d = ldlt.solve(rhs);
      bool ok = ldlt.info() == Eigen::Success && d.allFinite();
      for (std::size_t i = 0; i < u.size(); ++i) dir[i] = dof[i] >= 0 && ok ? d[dof[i]] : 0.0;
      slope = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) slope += grad[i] * dir[i];
      if (!ok || !(slope < 0.0)) {
        for (std::size_t i = 0; i < u.size(); ++i) dir[i] = dof[i] >= 0 ? -grad[i] : 0.0;
        slope = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) slope += grad[i] * dir[i];
        step = cfg.fixed_step;
      } else {
        step = 1.0;
      }
    } else {
      if (cfg.step == StepRule::adaptive_curvature && !prev_u.empty()) {
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          if (dof[i] < 0) continue;
          const double s = u[i] - prev_u[i], y = grad[i] - prev_g[i];
          ss += s * s;
          sy += s * y;
        }
        if (sy > 0.0) step = ss / sy;
      } else if (cfg.step == StepRule::fixed) {
        step = cfg.fixed_step;
      }
      for (std::size_t i = 0; i < u.size(); ++i) dir[i] = dof[i] >= 0 ? -grad[i] : 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) slope += grad[i] * dir[i];
    }

    // Backtracking: only energy-nonincreasing steps are accepted.
    bool accepted = false;
    double e_new = e;
    if (cfg.step == StepRule::newton && step == 1.0) {
      // Near the minimiser energy differences drop below roundoff and Armijo
      // rejects good Newton steps; accept those that shrink the residual.
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + dir[i];
      e_new = disc.energy(trial);
      if (std::isfinite(e_new) && e_new <= e + 1e-12 * (1.0 + std::abs(e)) && e_new > e + 1e-4 * slope) {
        std::vector<double> g_trial;
        disc.gradient(trial, g_trial);
        accepted = free_max(g_trial, dof) < res;
      } else {
        accepted = std::isfinite(e_new) && e_new <= e + 1e-4 * slope;
      }
    }
    for (int k = 0; k < 60 && !accepted; ++k) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + step * dir[i];
      e_new = disc.energy(trial);
      if (std::isfinite(e_new) && e_new <= e + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Armijo unattainable at roundoff level; take the step only if it does not raise the energy.
      if (std::isfinite(e_new) && e_new <= e) {
        accepted = true;
      } else {
        break;
      }
    }
    prev_u = u;
    prev_g = grad;
    u.swap(trial);
    e = e_new;
    history.push_back(e);
    disc.gradient(u, grad);
    res = free_max(grad, dof);
  }
  rep.iterations = it;
  rep.residual = res;
  rep.energy = e;
  rep.converged = res <= tolerance;
  return rep;
}

}  // namespace

double energy(const OperatorSpec& spec, const VectorField2D& u, const NodalLoad& load, double eps) {
  if (load.values.size() != u.values().size()) throw ValidationError("load does not match the field", "load");
  Discretization d(spec, u.mesh(), load);
  d.set_epsilon(eps);
  return d.energy(u.values());
}

double energy(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& load, double eps) {
  return energy(spec, u, assemble_load(u.mesh(), load), eps);
}

std::vector<double> energy_gradient(const OperatorSpec& spec, const VectorField2D& u, const NodalLoad& load,
                                    double eps) {
  if (load.values.size() != u.values().size()) throw ValidationError("load does not match the field", "load");
  Discretization d(spec, u.mesh(), load);
  d.set_epsilon(eps);
  std::vector<double> g;
  d.gradient(u.values(), g);
  return g;
}

double weak_residual(const OperatorSpec& spec, const VectorField2D& u, const NodalLoad& load, double eps) {
  const auto g = energy_gradient(spec, u, load, eps);
  double r = 0.0;
  const auto m = static_cast<std::size_t>(u.components());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!u.mesh().is_boundary(i / m)) r = std::max(r, std::abs(g[i]));
  return r;
}

SolveResult solve_dirichlet(const OperatorSpec& spec, std::shared_ptr<const Mesh2D> mesh, const NodalLoad& load,
                            const VectorField2D* boundary, const SolveConfig& cfg) {
  if (!mesh) throw ValidationError("missing mesh", "mesh");
  if (!(cfg.tol > 0.0)) throw ValidationError("tolerance must be positive", "tol");
  const int m = load.components;
  if (m != spec.m) throw ValidationError("load and operator disagree on the target dimension", "measure");
  const std::size_t nv = mesh->num_vertices();
  if (load.values.size() != nv * static_cast<std::size_t>(m)) throw ValidationError("load does not match the mesh", "load");
  if (boundary && (boundary->mesh_ptr() != mesh && boundary->mesh().num_vertices() != nv))
    throw ValidationError("boundary data lives on a different mesh", "boundary");
  if (boundary && boundary->components() != m) throw ValidationError("boundary data has the wrong dimension", "boundary");

  std::vector<int> dof(nv * static_cast<std::size_t>(m), -1);
  int nfree = 0;
  for (std::size_t v = 0; v < nv; ++v)
    if (!mesh->is_boundary(v))
      for (int c = 0; c < m; ++c) dof[v * m + c] = nfree++;

  std::vector<double> u(nv * static_cast<std::size_t>(m), 0.0);
  if (boundary) {
    for (std::size_t v = 0; v < nv; ++v)
      if (mesh->is_boundary(v))
        for (int c = 0; c < m; ++c) u[v * m + c] = boundary->at(v)[static_cast<std::size_t>(c)];
  }
  if (cfg.initial_noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-cfg.initial_noise, cfg.initial_noise);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (dof[i] >= 0) u[i] = unif(rng);
  }

  SolveResult result{VectorField2D(mesh, m), VectorField2D(mesh, m), {}, {}, 0.0};
  result.tolerance = cfg.tol * (1.0 + load.total_abs());
  Discretization disc(spec, *mesh, load);

  const double eps_final = cfg.epsilon >= 0.0 ? cfg.epsilon : mesh->resolution();
  std::vector<double> schedule;
  if (eps_final > 0.0)
    for (double e = cfg.epsilon_start; e > eps_final * (1.0 + 1e-12); e *= cfg.epsilon_factor) schedule.push_back(e);
  schedule.push_back(eps_final);

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    disc.set_epsilon(schedule[k]);
    const bool last = k + 1 == schedule.size();
    // Intermediate stages only provide warm starts.
    const double tol = last ? result.tolerance : std::max(result.tolerance, 1e-4 * (1.0 + load.total_abs()));
    auto rep = minimise(disc, u, dof, nfree, cfg, tol, result.energy_history);
    result.stages.push_back(rep);
    if (last && !rep.converged)
      throw ConvergenceError("solver did not converge at epsilon = " + format_number(rep.epsilon), rep.residual,
                             rep.iterations);
  }
  std::copy(u.begin(), u.end(), result.regularized.values().begin());

  if (cfg.polish && eps_final > 0.0) {
    disc.set_epsilon(0.0);
    auto rep = minimise(disc, u, dof, nfree, cfg, result.tolerance, result.energy_history);
    result.stages.push_back(rep);
    if (!rep.converged) throw ConvergenceError("unregularised pass did not converge", rep.residual, rep.iterations);
  }
  std::copy(u.begin(), u.end(), result.polished.values().begin());
  return result;
}

SolveResult solve_dirichlet(const OperatorSpec& spec, std::shared_ptr<const Mesh2D> mesh, const MeasureData& load,
                            const VectorField2D* boundary, const SolveConfig& cfg) {
  if (!mesh) throw ValidationError("missing mesh", "mesh");
  return solve_dirichlet(spec, mesh, assemble_load(*mesh, load), boundary, cfg);
}

RadialReference::RadialReference(YoungFunction G, double mass, double radius)
    : G_(std::move(G)), mass_(mass), radius_(radius) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (!(mass >= 0.0)) throw DomainError("mass must be nonnegative");
  const int per_octave = 64, octaves = 40;
  const int n = per_octave * octaves;
  table_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (mass == 0.0) return;
  const double q = std::exp2(-1.0 / per_octave);
  double hi = radius;
  std::vector<double> octave_sums(octaves, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double lo = hi * q;
    const double piece = quad::integrate([&](double s) { return integrand(s); }, lo, hi, 16);
    table_[static_cast<std::size_t>(k)] = table_[static_cast<std::size_t>(k) - 1] + piece;
    octave_sums[static_cast<std::size_t>((k - 1) / per_octave)] += piece;
    hi = lo;
  }
  const double ratio = quad::fit_decay_ratio(octave_sums, 8);
  divergent_ = ratio >= std::exp2(-0.02);
  center_ = divergent_ ? std::numeric_limits<double>::infinity()
                       : table_.back() + (ratio > 0.0 ? octave_sums.back() * ratio / (1.0 - ratio) : 0.0);
}

double RadialReference::integrand(double s) const {
  return G_.inverse_derivative(mass_ / (2.0 * std::numbers::pi * s));
}

double RadialReference::operator()(double r) const {
  if (r < 0.0) throw DomainError("radius must be nonnegative");
  if (mass_ == 0.0 || r >= radius_) return 0.0;
  if (r == 0.0) return center_;
  const double pos = -std::log2(r / radius_) * 64.0;
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= table_.size()) {
    // Below the table: integrate the remaining piece directly.
    const double last = radius_ * std::exp2(-static_cast<double>(table_.size() - 1) / 64.0);
    return table_.back() + quad::integrate_geometric([&](double s) { return integrand(s); }, r, last, 16);
  }
  const double node = radius_ * std::exp2(-static_cast<double>(k) / 64.0);
  return table_[k] + quad::integrate([&](double s) { return integrand(s); }, r, node, 16);
}

double gradient_l1_distance(const VectorField2D& u, const VectorField2D& v) {
  if (u.mesh().num_triangles() != v.mesh().num_triangles() || u.components() != v.components())
    throw ValidationError("fields live on different meshes", "field");
  double sum = 0.0;
  std::vector<double> a(2 * static_cast<std::size_t>(u.components())), b(a.size());
  for (std::size_t t = 0; t < u.mesh().num_triangles(); ++t) {
    u.gradient(t, a);
    v.gradient(t, b);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    sum += u.mesh().area(t) * std::sqrt(d);
  }
  return sum;
}

SolaResult sola_loop(const OperatorSpec& spec, std::shared_ptr<const Mesh2D> mesh, const MeasureData& measure,
                     const std::vector<double>& widths, const SolveConfig& cfg) {
  if (!mesh) throw ValidationError("missing mesh", "mesh");
  if (widths.empty()) throw ValidationError("need at least one width", "widths");
  for (std::size_t k = 1; k < widths.size(); ++k)
    if (!(widths[k] < widths[k - 1])) throw ValidationError("widths must decrease", "widths");
  const auto [lo, hi] = bounding_box(*mesh);
  SolaResult out;
  out.widths = widths;
  for (double w : widths) {
    const auto load = mollify(measure, w, lo, hi);
    out.iterates.push_back(solve_dirichlet(spec, mesh, load, nullptr, cfg).solution());
  }
  for (std::size_t k = 1; k < out.iterates.size(); ++k) {
    out.distances.push_back(gradient_l1_distance(out.iterates[k - 1], out.iterates[k]));
    if (k >= 2 && out.distances[k - 1] > out.distances[k - 2]) out.decreasing = false;
  }
  return out;
}

ComparisonResult aharmonic_comparison(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& measure,
                                      Point x0, double r, const SolveConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  const double half = 0.5 * r;
  auto sub = u.mesh().restrict_to([&](Point c) { return distance(c, x0) < half; });
  const int m = u.components();
  VectorField2D restricted(sub.mesh, m);
  for (std::size_t i = 0; i < sub.vertex_map.size(); ++i)
    for (int c = 0; c < m; ++c)
      restricted.at(i)[static_cast<std::size_t>(c)] = u.at(static_cast<std::size_t>(sub.vertex_map[i]))[static_cast<std::size_t>(c)];

  NodalLoad zero{m, std::vector<double>(sub.mesh->num_vertices() * static_cast<std::size_t>(m), 0.0)};
  auto solved = solve_dirichlet(spec, sub.mesh, zero, &restricted, cfg);

  ComparisonResult out{solved.solution(), sub.vertex_map, 0.0, 0.0, 0.0};
  out.lhs = gradient_l1_distance(restricted, out.v) / sub.mesh->total_area();
  out.excess_term = excess(u, x0, r) / r;
  const double mass = measure.ball_mass(x0, r);
  out.mass_term = mass > 0.0 ? spec.G.inverse_derivative(mass / r) : 0.0;
  return out;
}

}  // namespace potlab
