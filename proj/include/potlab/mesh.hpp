#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace potlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

using Triangle = std::array<int, 3>;

/// Conforming, positively oriented P1 triangulation of a planar domain.
///
/// Boundary vertices are the endpoints of edges owned by a single triangle.
/// Per-triangle areas, centroids and basis gradients are precomputed.
class Mesh2D {
 public:
  Mesh2D(std::vector<Point> vertices, std::vector<Triangle> triangles, double resolution);

  /// Structured grid of nx * ny squares split along the rising diagonal.
  static Mesh2D rectangle(Point lo, Point hi, int nx, int ny);

  /// Disk meshed by concentric rings of spacing ~h; ring k carries 6k
  /// vertices and the outer ring lies on the circle.
  static Mesh2D disk(Point center, double radius, double h);

  /// Disk whose rings are geometrically graded towards the center: `sectors`
  /// vertices per ring from `inner_radius` outwards until the ring spacing
  /// reaches h, then uniform rings of spacing h up to `radius`.
  static Mesh2D graded_disk(Point center, double radius, double h, double inner_radius, int sectors);

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  bool is_boundary(std::size_t v) const noexcept { return boundary_[v] != 0; }
  const std::vector<char>& boundary_mask() const noexcept { return boundary_; }
  double resolution() const noexcept { return resolution_; }

  double area(std::size_t t) const noexcept { return areas_[t]; }
  Point centroid(std::size_t t) const noexcept { return centroids_[t]; }
  /// Gradients of the three nodal basis functions on triangle t.
  const std::array<Point, 3>& basis_gradients(std::size_t t) const noexcept { return gradients_[t]; }
  double total_area() const noexcept;

  /// Triangle containing p (closed), or -1.
  int locate(Point p) const;
  /// Barycentric coordinates of p with respect to triangle t.
  std::array<double, 3> barycentric(std::size_t t, Point p) const;

  struct Restriction;
  /// Triangles whose centroid satisfies `keep`, renumbered; vertex_map[i]
  /// is the parent index of local vertex i.
  Restriction restrict_to(const std::function<bool(Point)>& keep) const;

  /// Rows "x,y" per vertex.
  void write_vertices_csv(std::ostream& os) const;

 private:
  void build_locator();

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<char> boundary_;
  std::vector<double> areas_;
  std::vector<Point> centroids_;
  std::vector<std::array<Point, 3>> gradients_;
  double resolution_;

  // Uniform bucket grid for point location.
  Point box_lo_{}, box_hi_{};
  int buckets_x_ = 1, buckets_y_ = 1;
  std::vector<std::vector<int>> buckets_;
};

struct Mesh2D::Restriction {
  std::shared_ptr<const Mesh2D> mesh;
  std::vector<int> vertex_map;
};

/// Per-vertex R^m values over a mesh; gradients are constant per triangle.
class VectorField2D {
 public:
  VectorField2D(std::shared_ptr<const Mesh2D> mesh, int components);
  VectorField2D(std::shared_ptr<const Mesh2D> mesh, int components, std::vector<double> values);

  /// Nodal interpolant of f: Point -> R^m.
  static VectorField2D interpolate(std::shared_ptr<const Mesh2D> mesh, int components,
                                   const std::function<void(Point, std::span<double>)>& f);

  const Mesh2D& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh2D>& mesh_ptr() const noexcept { return mesh_; }
  int components() const noexcept { return components_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<const double> at(std::size_t v) const noexcept {
    return {values_.data() + v * static_cast<std::size_t>(components_), static_cast<std::size_t>(components_)};
  }
  std::span<double> at(std::size_t v) noexcept {
    return {values_.data() + v * static_cast<std::size_t>(components_), static_cast<std::size_t>(components_)};
  }

  /// Du on triangle t, laid out as out[2 c + d] = d_d u_c.
  void gradient(std::size_t t, std::span<double> out) const;
  /// Frobenius norm of Du on triangle t.
  double gradient_norm(std::size_t t) const;
  /// Linear interpolation at p; false when p lies outside the mesh.
  bool evaluate(Point p, std::span<double> out) const;

  /// Header "x,y,u1,...,um" and one `%.12e` row per vertex.
  void write_csv(std::ostream& os) const;

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  int components_;
  std::vector<double> values_;
};

/// Quadrature points and weights covering B_r(center) ∩ mesh. Triangles cut by
/// the circle are subdivided and sub-triangles kept by centroid inclusion.
struct BallQuadrature {
  struct Node {
    int triangle;
    std::array<double, 3> bary;
    double weight;
  };
  Point center;
  double radius = 0.0;
  std::vector<Node> nodes;
  double covered_area = 0.0;

  static BallQuadrature build(const Mesh2D& mesh, Point center, double radius, int interior_level = 1,
                              int boundary_level = 4);

  /// Average of u over the ball, written into mean (size m).
  void mean(const VectorField2D& u, std::span<double> out) const;
  /// Average of f(u(x), x) over the ball.
  double average(const VectorField2D& u, const std::function<double(std::span<const double>, Point)>& f) const;
  /// Triangles touched, with the fraction of their area inside the ball.
  std::vector<std::pair<int, double>> triangle_fractions(const Mesh2D& mesh) const;
};

}  // namespace potlab
