#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "potlab/measure.hpp"
#include "potlab/mesh.hpp"
#include "potlab/solver.hpp"
#include "potlab/young.hpp"

namespace potlab::cli {

struct Domain {
  enum class Shape { disk, graded_disk, rectangle };
  Shape shape = Shape::disk;
  Point center{};
  double radius = 1.0;
  /// Graded disks only.
  double inner_radius = 0.0;
  int sectors = 0;
  /// Rectangles only.
  Point lo{};
  Point hi{};

  static Domain from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::shared_ptr<const Mesh2D> mesh(double h) const;
  std::pair<Point, Point> box() const;
};

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"young-audit", "wolff",      "rearrangement-bound", "solve",
                                              "sola",        "comparison", "excess-decay",        "pointwise",
                                              "vmo",         "campanato"};
  return names;
}

struct Scenario {
  std::string id;
  std::string task;
  std::string description;
  std::shared_ptr<const YoungFunction> young;
  CoefficientField coefficient = CoefficientField::constant(1.0);
  std::shared_ptr<const MeasureData> measure;
  Domain domain;
  std::vector<double> resolutions;
  nlohmann::json params = nlohmann::json::object();
  SolveConfig solver;
  std::uint64_t seed = 0;
  /// Original descriptor, echoed into the summary.
  nlohmann::json source;

  OperatorSpec operator_spec() const;
};

/// Parses one scenario; validation errors carry the field path.
Scenario parse_scenario(const nlohmann::json& j);

struct Batch {
  std::uint64_t seed = 0;
  std::vector<Scenario> scenarios;
};

/// Either a single scenario object or {"seed": s, "scenarios": [...]}. A
/// scenario may be {"builtin": id} to pull a catalog entry. The batch seed
/// (or POTLAB_SEED when set) applies to scenarios without their own seed.
Batch parse_batch(const nlohmann::json& j);
Batch load_batch(const std::filesystem::path& path);

struct Outcome {
  std::string id;
  bool ok = true;
  std::string diagnostic;
  nlohmann::json summary;
};

/// Runs one scenario writing CSV, SVG and summary.json into `dir`.
Outcome run_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// Runs the batch with `jobs` workers and writes summary.json in `out`;
/// returns 0 when every scenario passes its hard checks, 1 otherwise.
int run_batch(const Batch& batch, const std::filesystem::path& out, int jobs, std::ostream& log);

struct CatalogEntry {
  std::string id;
  std::string description;
  nlohmann::json descriptor;
};

const std::vector<CatalogEntry>& list_builtin_scenarios();

/// Dirichlet data for solve tasks: component c is
/// a_c x + b_c y + q_c (x^2 - y^2) + k_c, all zero by default.
VectorField2D boundary_field(std::shared_ptr<const Mesh2D> mesh, int components, const nlohmann::json& descriptor);

}  // namespace potlab::cli
