#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "potlab/field.hpp"
#include "potlab/measure.hpp"
#include "potlab/mesh.hpp"

namespace potlab {

enum class StepRule { fixed, adaptive_curvature, newton };

const char* to_string(StepRule rule);

struct SolveConfig {
  /// Final regularisation; negative selects the mesh resolution h.
  double epsilon = -1.0;
  /// Continuation starts here and shrinks by epsilon_factor per stage.
  double epsilon_start = 1.0;
  double epsilon_factor = 0.25;
  /// Iteration cap per continuation stage.
  int max_iter = 200;
  /// Stop when the free-dof residual max norm is below tol * (1 + sum |b|).
  double tol = 1e-8;
  StepRule step = StepRule::newton;
  /// Step length of the fixed rule and first step of the adaptive one.
  double fixed_step = 1e-2;
  /// Run a final unregularised pass.
  bool polish = true;
  /// Amplitude of the seeded random initial iterate (0 starts from the boundary lift).
  double initial_noise = 0.0;
  std::uint64_t seed = 0;

  static SolveConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Load vector b[v * m + c] = <mu_c, phi_v>.
struct NodalLoad {
  int components = 1;
  std::vector<double> values;

  double total_abs() const;
};

/// Atoms are split onto the vertices of the containing triangle by barycentric
/// weights; densities are integrated on subdivided cells or triangles. Mass
/// falling outside the mesh is dropped.
NodalLoad assemble_load(const Mesh2D& mesh, const MeasureData& load);

/// sum_T |T| a(x_T) G_eps(|Du_T|) - <u, b>, G_eps(t) = G(sqrt(t^2 + eps^2)) - G(eps).
double energy(const OperatorSpec& spec, const VectorField2D& u, const NodalLoad& load, double eps = 0.0);
double energy(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& load, double eps = 0.0);

/// Nodal gradient of the energy, all vertices included.
std::vector<double> energy_gradient(const OperatorSpec& spec, const VectorField2D& u, const NodalLoad& load,
                                    double eps = 0.0);

/// Max over interior vertices of the discrete weak-form residual.
double weak_residual(const OperatorSpec& spec, const VectorField2D& u, const NodalLoad& load, double eps = 0.0);

struct StageReport {
  double epsilon = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  bool converged = false;
};

struct SolveResult {
  /// Minimiser at the final regularisation.
  VectorField2D regularized;
  /// Result of the unregularised pass (equal to `regularized` when skipped).
  VectorField2D polished;
  std::vector<StageReport> stages;
  /// Energy after every accepted iteration, per stage in order.
  std::vector<double> energy_history;
  double tolerance = 0.0;

  const VectorField2D& solution() const noexcept { return polished; }
};

/// Minimises the energy with u = boundary on boundary vertices (zero when
/// boundary is null). Throws ConvergenceError when the final stage misses
/// its tolerance.
SolveResult solve_dirichlet(const OperatorSpec& spec, std::shared_ptr<const Mesh2D> mesh, const NodalLoad& load,
                            const VectorField2D* boundary, const SolveConfig& cfg);
SolveResult solve_dirichlet(const OperatorSpec& spec, std::shared_ptr<const Mesh2D> mesh, const MeasureData& load,
                            const VectorField2D* boundary, const SolveConfig& cfg);

/// u(r) = int_r^R g^{-1}(mass / (2 pi s)) ds, the radial solution on B_R with
/// a point mass at the center (n = 2).
class RadialReference {
 public:
  RadialReference(YoungFunction G, double mass, double radius);

  double operator()(double r) const;
  /// u(0); infinite when divergent.
  double center_value() const noexcept { return center_; }
  bool divergent() const noexcept { return divergent_; }
  double radius() const noexcept { return radius_; }
  double mass() const noexcept { return mass_; }

 private:
  double integrand(double s) const;

  YoungFunction G_;
  double mass_;
  double radius_;
  // u at the log grid radius_ * 2^{-k/64}.
  std::vector<double> table_;
  double center_ = 0.0;
  bool divergent_ = false;
};

struct SolaResult {
  std::vector<double> widths;
  std::vector<VectorField2D> iterates;
  /// sum_T |T| |Du_k - Du_{k+1}| for consecutive widths.
  std::vector<double> distances;
  bool decreasing = true;
};

/// Solves with the measure mollified at each width (decreasing).
SolaResult sola_loop(const OperatorSpec& spec, std::shared_ptr<const Mesh2D> mesh, const MeasureData& measure,
                     const std::vector<double>& widths, const SolveConfig& cfg);

struct ComparisonResult {
  /// A-harmonic map on the restricted mesh of B_{r/2}(x0) with data u.
  VectorField2D v;
  std::vector<int> vertex_map;
  /// Average of |Du - Dv| over B_{r/2}.
  double lhs = 0.0;
  /// (1/r) times the excess of u on B_r.
  double excess_term = 0.0;
  /// g^{-1}(|mu|(B_r) / r).
  double mass_term = 0.0;
};

ComparisonResult aharmonic_comparison(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& measure,
                                      Point x0, double r, const SolveConfig& cfg);

/// Integral of |Du - Dv| for fields on the same mesh.
double gradient_l1_distance(const VectorField2D& u, const VectorField2D& v);

/// Bounding box of the mesh vertices.
std::pair<Point, Point> bounding_box(const Mesh2D& mesh);

}  // namespace potlab
