#include "potlab/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <unordered_map>

#include "potlab/error.hpp"

namespace potlab {

namespace {

double signed_double_area(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

struct Ring {
  std::vector<int> ids;
  std::vector<double> angles;
};

Ring make_ring(std::vector<Point>& vertices, Point center, double radius, int count) {
  Ring ring;
  for (int j = 0; j < count; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / count;
    ring.ids.push_back(static_cast<int>(vertices.size()));
    ring.angles.push_back(theta);
    vertices.push_back({center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)});
  }
  return ring;
}

void push_oriented(std::vector<Triangle>& tris, const std::vector<Point>& v, int a, int b, int c) {
  if (signed_double_area(v[a], v[b], v[c]) < 0.0) std::swap(b, c);
  tris.push_back({a, b, c});
}

// Triangulates the annulus between two rings by merging their angular order.
void zip_rings(std::vector<Triangle>& tris, const std::vector<Point>& v, const Ring& inner, const Ring& outer) {
  const std::size_t na = inner.ids.size(), nb = outer.ids.size();
  auto angle = [](const Ring& r, std::size_t k) {
    const std::size_t n = r.ids.size();
    return k < n ? r.angles[k] : r.angles[k - n] + 2.0 * std::numbers::pi;
  };
  std::size_t i = 0, j = 0;
  while (i < na || j < nb) {
    const bool advance_inner = i < na && (j == nb || angle(inner, i + 1) < angle(outer, j + 1));
    if (advance_inner) {
      push_oriented(tris, v, inner.ids[i % na], outer.ids[j % nb], inner.ids[(i + 1) % na]);
      ++i;
    } else {
      push_oriented(tris, v, inner.ids[i % na], outer.ids[j % nb], outer.ids[(j + 1) % nb]);
      ++j;
    }
  }
}

Mesh2D rings_to_mesh(Point center, const std::vector<double>& radii, const std::vector<int>& counts, double h) {
  std::vector<Point> vertices{center};
  std::vector<Triangle> tris;
  Ring previous{{0}, {0.0}};
  for (std::size_t k = 0; k < radii.size(); ++k) {
    Ring ring = make_ring(vertices, center, radii[k], counts[k]);
    if (k == 0) {
      for (int j = 0; j < counts[0]; ++j)
        push_oriented(tris, vertices, 0, ring.ids[static_cast<std::size_t>(j)],
                      ring.ids[static_cast<std::size_t>((j + 1) % counts[0])]);
    } else {
      zip_rings(tris, vertices, previous, ring);
    }
    previous = std::move(ring);
  }
  return Mesh2D(std::move(vertices), std::move(tris), h);
}

}  // namespace

Mesh2D::Mesh2D(std::vector<Point> vertices, std::vector<Triangle> triangles, double resolution)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), resolution_(resolution) {
  const std::size_t nv = vertices_.size();
  if (triangles_.empty()) throw ValidationError("mesh has no triangles");
  areas_.resize(triangles_.size());
  centroids_.resize(triangles_.size());
  gradients_.resize(triangles_.size());
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(triangles_.size() * 3);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || static_cast<std::size_t>(v) >= nv) throw ValidationError("triangle references a missing vertex");
    const Point p0 = vertices_[tri[0]], p1 = vertices_[tri[1]], p2 = vertices_[tri[2]];
    const double det = signed_double_area(p0, p1, p2);
    if (!(det > 0.0)) throw ValidationError("triangle " + std::to_string(t) + " is not positively oriented");
    areas_[t] = 0.5 * det;
    centroids_[t] = {(p0.x + p1.x + p2.x) / 3.0, (p0.y + p1.y + p2.y) / 3.0};
    gradients_[t] = {Point{(p1.y - p2.y) / det, (p2.x - p1.x) / det}, Point{(p2.y - p0.y) / det, (p0.x - p2.x) / det},
                     Point{(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
    for (int e = 0; e < 3; ++e) {
      const auto a = static_cast<std::uint64_t>(std::min(tri[e], tri[(e + 1) % 3]));
      const auto b = static_cast<std::uint64_t>(std::max(tri[e], tri[(e + 1) % 3]));
      if (++edge_count[(a << 32) | b] > 2) throw ValidationError("non-conforming mesh: edge shared by three triangles");
    }
  }
  boundary_.assign(nv, 0);
  for (const auto& [key, count] : edge_count) {
    if (count == 1) {
      boundary_[key >> 32] = 1;
      boundary_[key & 0xffffffffULL] = 1;
    }
  }
  build_locator();
}

Mesh2D Mesh2D::rectangle(Point lo, Point hi, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(hi.x > lo.x) || !(hi.y > lo.y)) throw ValidationError("invalid rectangle mesh request");
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({lo.x + (hi.x - lo.x) * i / nx, lo.y + (hi.y - lo.y) * j / ny});
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = j * (nx + 1) + i, v10 = v00 + 1, v01 = v00 + nx + 1, v11 = v01 + 1;
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }
  }
  const double h = std::max((hi.x - lo.x) / nx, (hi.y - lo.y) / ny);
  return Mesh2D(std::move(vertices), std::move(tris), h);
}

Mesh2D Mesh2D::disk(Point center, double radius, double h) {
  if (!(radius > 0.0) || !(h > 0.0) || h > radius) throw ValidationError("invalid disk mesh request");
  const int rings = std::max(1, static_cast<int>(std::lround(radius / h)));
  std::vector<double> radii;
  std::vector<int> counts;
  for (int k = 1; k <= rings; ++k) {
    radii.push_back(radius * k / rings);
    counts.push_back(6 * k);
  }
  return rings_to_mesh(center, radii, counts, radius / rings);
}

Mesh2D Mesh2D::graded_disk(Point center, double radius, double h, double inner_radius, int sectors) {
  if (!(radius > 0.0) || !(h > 0.0) || !(inner_radius > 0.0) || inner_radius >= radius || sectors < 6)
    throw ValidationError("invalid graded disk mesh request");
  const double step = 2.0 * std::numbers::pi / sectors;
  std::vector<double> radii;
  std::vector<int> counts;
  double r = inner_radius;
  while (r * step < h && r < radius) {
    radii.push_back(r);
    counts.push_back(sectors);
    r *= 1.0 + step;
  }
  const double start = radii.empty() ? 0.0 : radii.back();
  const int uniform = std::max(1, static_cast<int>(std::ceil((radius - start) / h)));
  for (int k = 1; k <= uniform; ++k) {
    const double rk = start + (radius - start) * k / uniform;
    radii.push_back(rk);
    counts.push_back(std::max(sectors, static_cast<int>(std::lround(2.0 * std::numbers::pi * rk / h))));
  }
  return rings_to_mesh(center, radii, counts, h);
}

double Mesh2D::total_area() const noexcept {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

void Mesh2D::build_locator() {
  box_lo_ = box_hi_ = vertices_.front();
  for (const Point& p : vertices_) {
    box_lo_.x = std::min(box_lo_.x, p.x);
    box_lo_.y = std::min(box_lo_.y, p.y);
    box_hi_.x = std::max(box_hi_.x, p.x);
    box_hi_.y = std::max(box_hi_.y, p.y);
  }
  const int per_side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(triangles_.size()) / 2.0)));
  buckets_x_ = buckets_y_ = per_side;
  buckets_.assign(static_cast<std::size_t>(buckets_x_ * buckets_y_), {});
  const double wx = (box_hi_.x - box_lo_.x) / buckets_x_, wy = (box_hi_.y - box_lo_.y) / buckets_y_;
  auto cell = [](double v, double lo, double w, int n) {
    return std::clamp(static_cast<int>(std::floor((v - lo) / w)), 0, n - 1);
  };
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (int v : triangles_[t]) {
      x0 = std::min(x0, vertices_[v].x), x1 = std::max(x1, vertices_[v].x);
      y0 = std::min(y0, vertices_[v].y), y1 = std::max(y1, vertices_[v].y);
    }
    const int i0 = cell(x0, box_lo_.x, wx, buckets_x_), i1 = cell(x1, box_lo_.x, wx, buckets_x_);
    const int j0 = cell(y0, box_lo_.y, wy, buckets_y_), j1 = cell(y1, box_lo_.y, wy, buckets_y_);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * buckets_x_ + i)].push_back(static_cast<int>(t));
  }
}

std::array<double, 3> Mesh2D::barycentric(std::size_t t, Point p) const {
  const auto& tri = triangles_[t];
  const Point p0 = vertices_[tri[0]], p1 = vertices_[tri[1]], p2 = vertices_[tri[2]];
  const double det = 2.0 * areas_[t];
  const double l1 = signed_double_area(p0, p, p2) / det;
  const double l2 = signed_double_area(p0, p1, p) / det;
  return {1.0 - l1 - l2, l1, l2};
}

int Mesh2D::locate(Point p) const {
  const double tol = 1e-12 * std::max(box_hi_.x - box_lo_.x, box_hi_.y - box_lo_.y);
  if (p.x < box_lo_.x - tol || p.x > box_hi_.x + tol || p.y < box_lo_.y - tol || p.y > box_hi_.y + tol) return -1;
  const double wx = (box_hi_.x - box_lo_.x) / buckets_x_, wy = (box_hi_.y - box_lo_.y) / buckets_y_;
  const int i = std::clamp(static_cast<int>(std::floor((p.x - box_lo_.x) / wx)), 0, buckets_x_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - box_lo_.y) / wy)), 0, buckets_y_ - 1);
  int best = -1;
  double best_min = -1e300;
  for (int t : buckets_[static_cast<std::size_t>(j * buckets_x_ + i)]) {
    const auto b = barycentric(static_cast<std::size_t>(t), p);
    const double lo = std::min({b[0], b[1], b[2]});
    if (lo >= 0.0) return t;
    if (lo > best_min) best_min = lo, best = t;
  }
  return best_min > -1e-10 ? best : -1;
}

Mesh2D::Restriction Mesh2D::restrict_to(const std::function<bool(Point)>& keep) const {
  std::vector<int> local(vertices_.size(), -1);
  Restriction out;
  std::vector<Point> verts;
  std::vector<Triangle> tris;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    if (!keep(centroids_[t])) continue;
    Triangle nt{};
    for (int k = 0; k < 3; ++k) {
      const int v = triangles_[t][static_cast<std::size_t>(k)];
      if (local[static_cast<std::size_t>(v)] < 0) {
        local[static_cast<std::size_t>(v)] = static_cast<int>(verts.size());
        verts.push_back(vertices_[static_cast<std::size_t>(v)]);
        out.vertex_map.push_back(v);
      }
      nt[static_cast<std::size_t>(k)] = local[static_cast<std::size_t>(v)];
    }
    tris.push_back(nt);
  }
  if (tris.empty()) throw ValidationError("restriction selects no triangles");
  out.mesh = std::make_shared<const Mesh2D>(std::move(verts), std::move(tris), resolution_);
  return out;
}

void Mesh2D::write_vertices_csv(std::ostream& os) const {
  os << "x,y\n";
  char buf[64];
  for (const Point& p : vertices_) {
    std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", p.x, p.y);
    os << buf;
  }
}

VectorField2D::VectorField2D(std::shared_ptr<const Mesh2D> mesh, int components)
    : mesh_(std::move(mesh)), components_(components) {
  if (!mesh_ || components_ < 1 || components_ > 16)
    throw ValidationError("vector field needs a mesh and between 1 and 16 components");
  values_.assign(mesh_->num_vertices() * static_cast<std::size_t>(components_), 0.0);
}

VectorField2D::VectorField2D(std::shared_ptr<const Mesh2D> mesh, int components, std::vector<double> values)
    : mesh_(std::move(mesh)), components_(components), values_(std::move(values)) {
  if (!mesh_ || components_ < 1 || components_ > 16)
    throw ValidationError("vector field needs a mesh and between 1 and 16 components");
  if (values_.size() != mesh_->num_vertices() * static_cast<std::size_t>(components_))
    throw ValidationError("vector field size does not match the mesh");
}

VectorField2D VectorField2D::interpolate(std::shared_ptr<const Mesh2D> mesh, int components,
                                         const std::function<void(Point, std::span<double>)>& f) {
  VectorField2D u(std::move(mesh), components);
  for (std::size_t v = 0; v < u.mesh().num_vertices(); ++v) f(u.mesh().vertices()[v], u.at(v));
  return u;
}

void VectorField2D::gradient(std::size_t t, std::span<double> out) const {
  const auto& tri = mesh_->triangles()[t];
  const auto& grads = mesh_->basis_gradients(t);
  for (int c = 0; c < components_; ++c) {
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double val = values_[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)] * components_ + c)];
      gx += val * grads[static_cast<std::size_t>(k)].x;
      gy += val * grads[static_cast<std::size_t>(k)].y;
    }
    out[static_cast<std::size_t>(2 * c)] = gx;
    out[static_cast<std::size_t>(2 * c + 1)] = gy;
  }
}

double VectorField2D::gradient_norm(std::size_t t) const {
  double buf[32];
  std::span<double> g(buf, static_cast<std::size_t>(2 * components_));
  gradient(t, g);
  double s = 0.0;
  for (double x : g) s += x * x;
  return std::sqrt(s);
}

bool VectorField2D::evaluate(Point p, std::span<double> out) const {
  const int t = mesh_->locate(p);
  if (t < 0) return false;
  const auto b = mesh_->barycentric(static_cast<std::size_t>(t), p);
  const auto& tri = mesh_->triangles()[static_cast<std::size_t>(t)];
  for (int c = 0; c < components_; ++c) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
      s += b[static_cast<std::size_t>(k)] * values_[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)] * components_ + c)];
    out[static_cast<std::size_t>(c)] = s;
  }
  return true;
}

void VectorField2D::write_csv(std::ostream& os) const {
  os << "x,y";
  for (int c = 1; c <= components_; ++c) os << ",u" << c;
  os << '\n';
  char buf[64];
  for (std::size_t v = 0; v < mesh_->num_vertices(); ++v) {
    const Point p = mesh_->vertices()[v];
    std::snprintf(buf, sizeof buf, "%.12e,%.12e", p.x, p.y);
    os << buf;
    for (double x : at(v)) {
      std::snprintf(buf, sizeof buf, ",%.12e", x);
      os << buf;
    }
    os << '\n';
  }
}

namespace {

// Recursive midpoint subdivision in barycentric coordinates.
void subdivide(const std::array<std::array<double, 3>, 3>& corners, int level,
               const std::function<void(const std::array<std::array<double, 3>, 3>&)>& leaf) {
  if (level == 0) {
    leaf(corners);
    return;
  }
  auto mid = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  const auto m01 = mid(corners[0], corners[1]), m12 = mid(corners[1], corners[2]), m20 = mid(corners[2], corners[0]);
  subdivide({corners[0], m01, m20}, level - 1, leaf);
  subdivide({m01, corners[1], m12}, level - 1, leaf);
  subdivide({m20, m12, corners[2]}, level - 1, leaf);
  subdivide({m01, m12, m20}, level - 1, leaf);
}

}  // namespace

BallQuadrature BallQuadrature::build(const Mesh2D& mesh, Point center, double radius, int interior_level,
                                     int boundary_level) {
  BallQuadrature q;
  q.center = center;
  q.radius = radius;
  const std::array<std::array<double, 3>, 3> unit{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const double r2 = radius * radius;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point p[3] = {mesh.vertices()[static_cast<std::size_t>(tri[0])], mesh.vertices()[static_cast<std::size_t>(tri[1])],
                        mesh.vertices()[static_cast<std::size_t>(tri[2])]};
    const double x0 = std::min({p[0].x, p[1].x, p[2].x}), x1 = std::max({p[0].x, p[1].x, p[2].x});
    const double y0 = std::min({p[0].y, p[1].y, p[2].y}), y1 = std::max({p[0].y, p[1].y, p[2].y});
    const double dx = std::max({x0 - center.x, 0.0, center.x - x1});
    const double dy = std::max({y0 - center.y, 0.0, center.y - y1});
    if (dx * dx + dy * dy > r2) continue;
    bool all_inside = true;
    for (const Point& v : p)
      if ((v.x - center.x) * (v.x - center.x) + (v.y - center.y) * (v.y - center.y) > r2) all_inside = false;
    const double area = mesh.area(t);
    const int level = all_inside ? interior_level : boundary_level;
    const double sub_area = area / std::pow(4.0, level);
    subdivide(unit, level, [&](const std::array<std::array<double, 3>, 3>& c) {
      const std::array<double, 3> b{(c[0][0] + c[1][0] + c[2][0]) / 3.0, (c[0][1] + c[1][1] + c[2][1]) / 3.0,
                                    (c[0][2] + c[1][2] + c[2][2]) / 3.0};
      if (!all_inside) {
        const double x = b[0] * p[0].x + b[1] * p[1].x + b[2] * p[2].x;
        const double y = b[0] * p[0].y + b[1] * p[1].y + b[2] * p[2].y;
        if ((x - center.x) * (x - center.x) + (y - center.y) * (y - center.y) > r2) return;
      }
      q.nodes.push_back({static_cast<int>(t), b, sub_area});
      q.covered_area += sub_area;
    });
  }
  return q;
}

void BallQuadrature::mean(const VectorField2D& u, std::span<double> out) const {
  const int m = u.components();
  std::fill(out.begin(), out.end(), 0.0);
  if (covered_area == 0.0) return;
  const auto& tris = u.mesh().triangles();
  for (const Node& n : nodes) {
    const auto& tri = tris[static_cast<std::size_t>(n.triangle)];
    for (int c = 0; c < m; ++c) {
      double val = 0.0;
      for (int k = 0; k < 3; ++k) val += n.bary[static_cast<std::size_t>(k)] * u.at(static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]))[static_cast<std::size_t>(c)];
      out[static_cast<std::size_t>(c)] += n.weight * val;
    }
  }
  for (double& x : out) x /= covered_area;
}

double BallQuadrature::average(const VectorField2D& u,
                               const std::function<double(std::span<const double>, Point)>& f) const {
  if (covered_area == 0.0) return 0.0;
  const int m = u.components();
  const auto& tris = u.mesh().triangles();
  const auto& verts = u.mesh().vertices();
  std::vector<double> val(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (const Node& n : nodes) {
    const auto& tri = tris[static_cast<std::size_t>(n.triangle)];
    Point x{0.0, 0.0};
    std::fill(val.begin(), val.end(), 0.0);
    for (int k = 0; k < 3; ++k) {
      const auto v = static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]);
      const double b = n.bary[static_cast<std::size_t>(k)];
      x.x += b * verts[v].x;
      x.y += b * verts[v].y;
      for (int c = 0; c < m; ++c) val[static_cast<std::size_t>(c)] += b * u.at(v)[static_cast<std::size_t>(c)];
    }
    sum += n.weight * f(val, x);
  }
  return sum / covered_area;
}

std::vector<std::pair<int, double>> BallQuadrature::triangle_fractions(const Mesh2D& mesh) const {
  std::vector<std::pair<int, double>> out;
  for (const Node& n : nodes) {
    if (out.empty() || out.back().first != n.triangle) out.emplace_back(n.triangle, 0.0);
    out.back().second += n.weight / mesh.area(static_cast<std::size_t>(n.triangle));
  }
  return out;
}

}  // namespace potlab
