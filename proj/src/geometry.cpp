#include "cylspec/geometry.hpp"

#include "cylspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cylspec {

namespace {

// Signed distance of X to the supporting line of edge i (positive outside).
double edge_signed_distance(const ConvexPolygon& poly, std::size_t i, double x, double y) {
  const auto& a = poly.vertices[i];
  const auto& b = poly.vertices[(i + 1) % poly.vertices.size()];
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  const double len = std::hypot(dx, dy);
  return ((x - a[0]) * dy - (y - a[1]) * dx) / len;
}

}  // namespace

BaseSpec BaseSpec::interval(double a, double b) {
  if (!(a < b)) throw GeometryError("interval base must satisfy a < b");
  if (!(a < 0.0 && 0.0 < b)) throw GeometryError("base must contain the origin strictly inside");
  return BaseSpec(Interval{a, b});
}

BaseSpec BaseSpec::polygon(std::vector<Point2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    if (std::hypot(b[0] - a[0], b[1] - a[1]) < 1e-12) throw GeometryError("polygon has a degenerate edge");
    for (std::size_t j = i + 1; j < n; ++j)
      if (vertices[i] == vertices[j]) throw GeometryError("polygon has repeated vertices");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    const auto& c = vertices[(i + 2) % n];
    const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (!(cross > 1e-14)) throw GeometryError("polygon must be strictly convex and counter-clockwise");
  }
  // Total turning of a strictly convex CCW polygon is exactly 2π.
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    const auto& c = vertices[(i + 2) % n];
    const double t1 = std::atan2(b[1] - a[1], b[0] - a[0]);
    const double t2 = std::atan2(c[1] - b[1], c[0] - b[0]);
    double d = t2 - t1;
    while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    turning += d;
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) throw GeometryError("polygon is self-intersecting");

  ConvexPolygon poly{std::move(vertices)};
  for (std::size_t i = 0; i < n; ++i)
    if (!(edge_signed_distance(poly, i, 0.0, 0.0) < 0.0))
      throw GeometryError("base must contain the origin strictly inside");
  return BaseSpec(std::move(poly));
}

double BaseSpec::diameter() const {
  if (is_interval()) return as_interval().length();
  const auto& v = as_polygon().vertices;
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, std::hypot(v[i][0] - v[j][0], v[i][1] - v[j][1]));
  return d;
}

double BaseSpec::measure() const {
  if (is_interval()) return as_interval().length();
  const auto& v = as_polygon().vertices;
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

bool BaseSpec::is_axis_box() const {
  if (is_interval()) return true;
  const auto& v = as_polygon().vertices;
  if (v.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % 4];
    if (a[0] != b[0] && a[1] != b[1]) return false;
  }
  return true;
}

std::array<double, 4> BaseSpec::bounds() const {
  if (is_interval()) return {as_interval().a, as_interval().b, 0.0, 0.0};
  std::array<double, 4> b{1e300, -1e300, 1e300, -1e300};
  for (const auto& p : as_polygon().vertices) {
    b[0] = std::min(b[0], p[0]);
    b[1] = std::max(b[1], p[0]);
    b[2] = std::min(b[2], p[1]);
    b[3] = std::max(b[3], p[1]);
  }
  return b;
}

BaseSpec regular_polygon(int sides, double circumradius, double rotation) {
  if (sides < 3) throw GeometryError("regular polygon needs at least 3 sides");
  if (!(circumradius > 0.0)) throw GeometryError("circumradius must be positive");
  std::vector<Point2> v;
  v.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double t = rotation + 2.0 * std::numbers::pi * k / sides;
    v.push_back({circumradius * std::cos(t), circumradius * std::sin(t)});
  }
  return BaseSpec::polygon(std::move(v));
}

CrossSectionSpec::CrossSectionSpec(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw GeometryError("cross-section needs at least one interval");
  if (intervals_.size() > 2) throw GeometryError("cross-sections with p > 2 are not supported");
  for (const auto& iv : intervals_)
    if (!(iv.a < iv.b)) throw GeometryError("cross-section interval must be nonempty");
}

double CrossSectionSpec::measure() const {
  double m = 1.0;
  for (const auto& iv : intervals_) m *= iv.length();
  return m;
}

double CrossSectionSpec::diameter() const {
  double s = 0.0;
  for (const auto& iv : intervals_) s += iv.length() * iv.length();
  return std::sqrt(s);
}

CylinderSpec::CylinderSpec(BaseSpec base, CrossSectionSpec cross, double scale)
    : base_(std::move(base)), cross_(std::move(cross)), scale_(scale) {
  if (!(scale_ > 0.0)) throw GeometryError("scale must be positive");
  if (m() + p() > 3) throw GeometryError("only m + p <= 3 is meshable");
}

double CylinderSpec::diameter() const {
  const double b = scale_ * base_.diameter();
  const double c = cross_.diameter();
  return std::sqrt(b * b + c * c);
}

Direction::Direction(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty() || components_.size() > 2) throw GeometryError("direction must live in R^1 or R^2");
  double s = 0.0;
  for (double c : components_) s += c * c;
  if (std::abs(std::sqrt(s) - 1.0) > 1e-12) throw GeometryError("direction must be a unit vector");
}

Direction Direction::from_angle(double theta) { return Direction({std::cos(theta), std::sin(theta)}); }

Direction Direction::normalized(std::vector<double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  s = std::sqrt(s);
  if (!(s > 0.0)) throw GeometryError("cannot normalise a zero vector");
  for (double& c : v) c /= s;
  return Direction(std::move(v));
}

double Direction::angle() const {
  if (dim() == 1) return components_[0] > 0.0 ? 0.0 : std::numbers::pi;
  double t = std::atan2(components_[1], components_[0]);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  return t;
}

const char* to_string(BoundaryTag tag) { return tag == BoundaryTag::Dirichlet ? "DIRICHLET" : "NEUMANN"; }

namespace {

// Max signed distance of X to the scaled base boundary lines (<= 0 inside).
double scaled_base_signed_distance(const BaseSpec& base, double scale, std::span<const double> X) {
  if (base.is_interval()) {
    const auto& iv = base.as_interval();
    return std::max(scale * iv.a - X[0], X[0] - scale * iv.b);
  }
  const auto& poly = base.as_polygon();
  double d = -1e300;
  for (std::size_t i = 0; i < poly.vertices.size(); ++i)
    d = std::max(d, edge_signed_distance(poly, i, X[0] / scale, X[1] / scale) * scale);
  return d;
}

}  // namespace

int lateral_face_of(const CylinderSpec& cyl, std::span<const double> point) {
  const double tol = cyl.tolerance();
  const double s = cyl.scale();
  const auto& base = cyl.base();
  if (base.is_interval()) {
    const auto& iv = base.as_interval();
    if (std::abs(point[0] - s * iv.b) <= tol) return 0;
    if (std::abs(point[0] - s * iv.a) <= tol) return 1;
    return -1;
  }
  if (scaled_base_signed_distance(base, s, point) > tol) return -1;
  const auto& poly = base.as_polygon();
  for (std::size_t i = 0; i < poly.vertices.size(); ++i)
    if (std::abs(edge_signed_distance(poly, i, point[0] / s, point[1] / s) * s) <= tol) return static_cast<int>(i);
  return -1;
}

BoundaryTag classify_boundary_facet(const CylinderSpec& cyl, std::span<const double> centroid,
                                    std::span<const double> normal) {
  const int m = cyl.m();
  const int p = cyl.p();
  if (static_cast<int>(centroid.size()) != m + p || static_cast<int>(normal.size()) != m + p)
    throw GeometryError("facet dimension does not match the cylinder");
  const double tol = cyl.tolerance();

  bool xi_on_boundary = false;
  for (int j = 0; j < p; ++j) {
    const auto& iv = cyl.cross()[j];
    const double xj = centroid[m + j];
    if (std::abs(xj - iv.a) <= tol || std::abs(xj - iv.b) <= tol) xi_on_boundary = true;
  }
  double normal_xi = 0.0;
  for (int j = 0; j < p; ++j) normal_xi = std::max(normal_xi, std::abs(normal[m + j]));
  const bool lateral_normal = normal_xi <= 1e-9;
  const bool X_on_boundary = std::abs(scaled_base_signed_distance(cyl.base(), cyl.scale(), centroid)) <= tol;

  if (xi_on_boundary && !lateral_normal) return BoundaryTag::Dirichlet;
  if (X_on_boundary && lateral_normal && !xi_on_boundary) return BoundaryTag::Neumann;
  if (xi_on_boundary) return BoundaryTag::Dirichlet;
  if (X_on_boundary) return BoundaryTag::Neumann;
  throw GeometryError("interior facet");
}

bool point_in_scaled_base(const BaseSpec& base, double r, std::span<const double> X) {
  if (base.is_interval()) {
    const double x = X[0] / r;
    return base.as_interval().a < x && x < base.as_interval().b;
  }
  const double x = X[0] / r;
  const double y = X[1] / r;
  const auto& poly = base.as_polygon();
  for (std::size_t i = 0; i < poly.vertices.size(); ++i)
    if (!(edge_signed_distance(poly, i, x, y) < 0.0)) return false;
  return true;
}

std::vector<FaceNormal> outward_normals(const BaseSpec& base) {
  std::vector<FaceNormal> out;
  if (base.is_interval()) {
    out.push_back({Direction({1.0}), 0});
    out.push_back({Direction({-1.0}), 1});
    return out;
  }
  const auto& v = base.as_polygon().vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len = std::hypot(dx, dy);
    if (len < 1e-12) throw GeometryError("degenerate edge");
    out.push_back({Direction::normalized({dy / len, -dx / len}), static_cast<int>(i)});
  }
  return out;
}

std::vector<double> face_centroid(const BaseSpec& base, int face_id) {
  if (base.is_interval()) {
    if (face_id == 0) return {base.as_interval().b};
    if (face_id == 1) return {base.as_interval().a};
    throw GeometryError("interval has faces 0 (right) and 1 (left) only");
  }
  const auto& v = base.as_polygon().vertices;
  if (face_id < 0 || face_id >= static_cast<int>(v.size())) throw GeometryError("face id out of range");
  const auto& a = v[face_id];
  const auto& b = v[(face_id + 1) % v.size()];
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

double face_length(const BaseSpec& base, int face_id) {
  if (base.is_interval()) return 1.0;
  const auto& v = base.as_polygon().vertices;
  if (face_id < 0 || face_id >= static_cast<int>(v.size())) throw GeometryError("face id out of range");
  const auto& a = v[face_id];
  const auto& b = v[(face_id + 1) % v.size()];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

}  // namespace cylspec
