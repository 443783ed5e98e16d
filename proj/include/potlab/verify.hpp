#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "potlab/field.hpp"
#include "potlab/measure.hpp"
#include "potlab/mesh.hpp"
#include "potlab/report.hpp"

namespace potlab {

/// Average of |u - (u)_B| over B = B_r(x0). Throws ValidationError when the
/// mesh covers less than 95% of the ball.
double excess(const VectorField2D& u, Point x0, double r);
/// Average of |u - xi| over B_r(x0).
double average_deviation(const VectorField2D& u, Point x0, double r, std::span<const double> xi);
/// Average of |u| over B_r(x0).
double average_norm(const VectorField2D& u, Point x0, double r);
/// Diameter of B_r(x0) in units of the typical local triangle size.
double ball_resolution(const Mesh2D& mesh, Point x0, double r);

struct ExcessSequence {
  Point center;
  double radius = 0.0;
  double sigma = 0.0;
  /// r_j = sigma^{j+1} radius.
  std::vector<double> radii;
  std::vector<double> values;
  double alpha_V = 0.5;
  double alpha_D = 0.75;
};

struct ExcessDecay {
  ExcessSequence sequence;
  /// Samples E_{j+1} against sigma^{alpha_D} E_j + m_j with
  /// m_j = r_j g^{-1}(|mu|(B^j) / r_j).
  EstimateReport report;
  /// Smallest pair (c_D, c_E), in the sum c_D + c_E, with
  /// E_{j+1} <= c_D sigma^{alpha_D} E_j + c_E m_j for every j.
  double c_D = 0.0;
  double c_E = 0.0;
  /// Least-squares slope of log E_j against log r_j (NaN when undefined).
  double decay_exponent = 0.0;
  std::vector<std::string> warnings;
};

/// Balls resolved by fewer than 10 triangles across truncate the sequence.
ExcessDecay excess_decay_run(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& load, Point x0,
                             double r, double sigma, int levels, double alpha_V = 0.5);

struct PointwiseCheck {
  double wolff = 0.0;
  bool wolff_divergent = false;
  /// |u(x0)| against W + avg |u|.
  double value_lhs = 0.0;
  double value_rhs = 0.0;
  /// |u(x0) - (u)_B| against W + excess.
  double osc_lhs = 0.0;
  double osc_rhs = 0.0;
};

/// Uses the nodal value at x0 (interpolated when x0 is not a vertex).
PointwiseCheck pointwise_wolff_check(const OperatorSpec& spec, const VectorField2D& u, const MeasureData& measure,
                                     Point x0, double r);
/// Adds the two samples of `check` to series `series + "/value"` and `series + "/osc"`.
void record(EstimateReport& report, const PointwiseCheck& check, double axis, const std::string& series);

struct VmoProfile {
  /// (radius, excess), radii decreasing.
  std::vector<std::pair<double, double>> samples;
  bool vanishing = false;
};

/// Vanishing when the excess is nonincreasing over the last three radii and
/// the final value is at most `threshold` times the first.
VmoProfile vmo_profile(const VectorField2D& u, Point x0, std::span<const double> radii, double threshold = 0.25);

struct CampanatoFit {
  double theta_hat = 0.0;
  double c_hat = 0.0;
  double residual = 0.0;
  /// All excess values vanish; theta_hat is undefined.
  bool exact_fit = false;
};

/// excess(rho) ~ c rho^theta by least squares in log-log coordinates.
CampanatoFit campanato_fit(const VectorField2D& u, Point x0, std::span<const double> radii);

struct AbsorbResult {
  bool hypothesis_ok = true;
  /// (r1, r2) violating the hypothesis.
  std::pair<double, double> witness{0.0, 0.0};
  double c = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool conclusion_holds = false;
};

/// phi(r1) <= phi(r2)/2 + A + B/(r2 - r1)^beta on a grid over [R/2, 3R/4]
/// implies phi(R/2) <= c (A + B/R^beta) with c = max(2, 3 4^beta / (1 - lambda)^beta),
/// lambda = (3/4)^{1/beta}.
AbsorbResult iterate_absorb(const std::function<double(double)>& phi, double R, double A, double B, double beta,
                            int grid = 64);

struct GeometricResult {
  double eps0 = 0.0;
  bool eps0_ok = false;
  bool hypothesis_ok = true;
  std::pair<double, double> witness{0.0, 0.0};
  double c = 0.0;
  /// Largest ratio phi(rho) / (c ((rho/r)^gamma phi(r) + B rho^beta)) over the grid.
  double worst_ratio = 0.0;
  bool conclusion_holds = false;
};

/// phi(rho) <= A[(rho/r)^alpha + eps] phi(r) + B r^beta on grid pairs implies,
/// for eps < eps0 = tau^alpha, phi(rho) <= c[(rho/r)^gamma phi(r) + B rho^beta]
/// with tau = min(1/2, (2A)^{1/(gamma-alpha)}) and
/// c = max(tau^{-gamma}, tau^{-2 beta} / (1 - tau^{gamma-beta})).
GeometricResult iterate_geometric(const std::function<double(double)>& phi, double R, double A, double eps,
                                  double alpha, double B, double beta, double gamma, int grid = 64);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error() const;
};

/// int_0^inf nu({|f| < t}) / (1+t)^{2+gamma} dt against
/// (1/(1+gamma)) int omega / (1+|f|)^{1+gamma}, nu = omega dx, on cells of
/// equal volume.
IdentityCheck cavalieri_identity(std::span<const double> omega, std::span<const double> f, double cell_volume,
                                 double gamma);

/// avg_{B_{sigma' r}} G(|Dv|) against
/// avg_{B_{sigma r}} G(|v - (v)_{B_{sigma r}}| / r) / (sigma - sigma')^{s_G}.
IdentityCheck caccioppoli_check(const YoungFunction& G, const VectorField2D& v, Point x0, double r, double sigma,
                                double sigma_inner);

/// int G^2(|u|) against (int G(|Du|))^2 (n' = 2 in the plane).
IdentityCheck sobolev_poincare_check(const YoungFunction& G, const VectorField2D& u);

/// Ratios excess(delta R) / (delta^{1 + (varsigma - 1)/s_G} excess(R)) per delta.
EstimateReport oscillation_decay_check(const YoungFunction& G, const VectorField2D& v, Point x0, double R,
                                       std::span<const double> deltas, double varsigma = 0.5);

}  // namespace potlab
