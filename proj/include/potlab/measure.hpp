#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "potlab/mesh.hpp"
#include "potlab/report.hpp"
#include "potlab/young.hpp"

namespace potlab {

struct Atom {
  Point point;
  std::vector<double> weight;
};

/// Uniform cell grid over the box [lo, hi].
struct GridSpec {
  Point lo;
  Point hi;
  int nx = 1;
  int ny = 1;

  double dx() const { return (hi.x - lo.x) / nx; }
  double dy() const { return (hi.y - lo.y) / ny; }
  double cell_area() const { return dx() * dy(); }
  Point cell_center(int i, int j) const { return {lo.x + (i + 0.5) * dx(), lo.y + (j + 0.5) * dy()}; }
};

/// Cellwise constant R^m density; values[(j * nx + i) * m + c].
struct GridDensity {
  GridSpec grid;
  int components = 1;
  std::vector<double> values;

  /// Euclidean norm of the density vector in cell (i, j).
  double norm(int i, int j) const;
};

/// Density coefficient * |x - center|^{-exponent} * direction on |x - center| < support.
struct RadialProfile {
  Point center;
  std::vector<double> direction;
  double coefficient = 1.0;
  double exponent = 0.0;
  double support = 1.0;

  double direction_norm() const;
  /// |density| at distance s from the center.
  double magnitude(double s) const;
};

/// Vector-valued bounded Radon measure in the plane.
class MeasureData {
 public:
  using Kind = std::variant<std::vector<Atom>, GridDensity, RadialProfile>;

  static MeasureData zero(int components);
  static MeasureData atoms(std::vector<Atom> atoms, int components);
  static MeasureData grid(GridDensity density);
  static MeasureData radial(RadialProfile profile);

  /// Descriptor {"kind": "atoms"|"grid"|"radial"|"uniform_disk"|"zero", ...}.
  static MeasureData from_json(const nlohmann::json& descriptor);
  nlohmann::json to_json() const;

  const Kind& kind() const noexcept { return kind_; }
  int components() const noexcept { return components_; }
  int dimension() const noexcept { return 2; }

  /// |mu|(closed ball B_r(x0)).
  double ball_mass(Point x0, double r) const;
  /// |mu|(R^2).
  double total_variation() const;
  /// Componentwise total mu(R^2).
  std::vector<double> total() const;
  /// The measure multiplied by lambda.
  MeasureData scaled(double lambda) const;

 private:
  MeasureData(Kind kind, int components);

  Kind kind_;
  int components_;
};

inline double ball_mass(const MeasureData& m, Point x0, double r) { return m.ball_mass(x0, r); }

/// Flat row-major grid density CSV: a header row "nx,ny,m,x_min,y_min,x_max,y_max",
/// its values, a row "f1,...,fm" and then one row per cell.
void write_grid_csv(std::ostream& os, const GridDensity& density);
GridDensity read_grid_csv(std::istream& is);

/// Ratios |mu|(B_r(x)) / (r^{n-1} g(r^{theta-1})) over all (center, radius)
/// pairs; one series per center, radii in the given order.
EstimateReport check_morrey(const MeasureData& measure, const YoungFunction& G, double theta,
                            std::span<const double> radii, std::span<const Point> centers);

/// Normalised radial bump C exp(-1/(1 - |x|^2)) on the unit disk.
double mollifier_kernel(double r);
/// Value at the origin, C / e.
double mollifier_peak();

/// Convolution with the bump of radius `width`, sampled on cells of size
/// width / cells_per_width. Mass is renormalised per source so that the
/// discrete total matches the source total exactly.
MeasureData mollify(const MeasureData& measure, double width, Point domain_lo, Point domain_hi,
                    int cells_per_width = 6);

/// Weight a(x) bounded between positive constants with a declared modulus of continuity.
class CoefficientField {
 public:
  enum class Modulus { constant, holder, lipschitz };

  static CoefficientField constant(double value);
  /// base + amplitude cos(frequency x) cos(frequency y); Lipschitz.
  static CoefficientField cosine(double base, double amplitude, double frequency);
  /// base + amplitude min(1, |x - center|)^exponent; Hölder.
  static CoefficientField holder(double base, double amplitude, double exponent, Point center);

  static CoefficientField from_json(const nlohmann::json& descriptor);
  nlohmann::json to_json() const;

  double operator()(Point x) const;
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  Modulus modulus_kind() const noexcept { return modulus_; }
  /// Declared modulus omega_a(r).
  double modulus(double r) const;
  bool is_constant() const noexcept { return modulus_ == Modulus::constant; }

 private:
  enum class Shape { constant, cosine, holder };
  CoefficientField() = default;

  Shape shape_ = Shape::constant;
  Modulus modulus_ = Modulus::constant;
  double base_ = 1.0, amplitude_ = 0.0, parameter_ = 0.0;
  Point center_{};
  double lower_ = 1.0, upper_ = 1.0;
};

}  // namespace potlab
