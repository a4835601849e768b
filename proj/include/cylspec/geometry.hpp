#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cylspec {

using Point2 = std::array<double, 2>;

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const noexcept { return b - a; }
};

/// Strictly convex polygon, counter-clockwise, origin strictly inside.
struct ConvexPolygon {
  std::vector<Point2> vertices;
};

/// The base ω₁ ⊂ ℝ^m: an interval (m = 1) or a convex polygon (m = 2).
class BaseSpec {
public:
  /// Validates the invariants; throws GeometryError.
  static BaseSpec interval(double a, double b);
  static BaseSpec polygon(std::vector<Point2> vertices);

  int dim() const noexcept { return std::holds_alternative<Interval>(shape_) ? 1 : 2; }
  bool is_interval() const noexcept { return dim() == 1; }
  const Interval& as_interval() const { return std::get<Interval>(shape_); }
  const ConvexPolygon& as_polygon() const { return std::get<ConvexPolygon>(shape_); }

  /// Always true for a constructed value; kept for parity with the config echo.
  bool contains_origin() const noexcept { return true; }

  /// Largest distance between two points of ω₁.
  double diameter() const;
  /// m-dimensional measure of ω₁.
  double measure() const;
  /// Axis-aligned rectangle (polygon with 4 axis-parallel edges)?
  bool is_axis_box() const;
  /// Bounding box [xmin, xmax, ymin, ymax]; for intervals only the first two.
  std::array<double, 4> bounds() const;

private:
  explicit BaseSpec(std::variant<Interval, ConvexPolygon> s) : shape_(std::move(s)) {}
  std::variant<Interval, ConvexPolygon> shape_;
};

/// Regular polygon centred at the origin, vertex k at angle rotation + 2πk/sides.
BaseSpec regular_polygon(int sides, double circumradius, double rotation = 0.0);

/// The cross-section ω₂ as a box, one interval per ξ-direction.
class CrossSectionSpec {
public:
  explicit CrossSectionSpec(std::vector<Interval> intervals);
  int dim() const noexcept { return static_cast<int>(intervals_.size()); }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  const Interval& operator[](int j) const { return intervals_[j]; }
  double measure() const;
  double diameter() const;

private:
  std::vector<Interval> intervals_;
};

/// Ω_ℓ = ℓω₁ × ω₂. Coordinates are ordered (X₁..X_m, ξ₁..ξ_p).
class CylinderSpec {
public:
  CylinderSpec(BaseSpec base, CrossSectionSpec cross, double scale);
  const BaseSpec& base() const noexcept { return base_; }
  const CrossSectionSpec& cross() const noexcept { return cross_; }
  double scale() const noexcept { return scale_; }
  int m() const noexcept { return base_.dim(); }
  int p() const noexcept { return cross_.dim(); }
  int dim() const noexcept { return m() + p(); }
  double diameter() const;
  /// Boundary membership tolerance: 1e-9 × diameter.
  double tolerance() const { return 1e-9 * diameter(); }

private:
  BaseSpec base_;
  CrossSectionSpec cross_;
  double scale_;
};

/// Unit vector ν ∈ S^{m-1}.
class Direction {
public:
  /// Throws GeometryError unless ‖v‖₂ = 1 within 1e-12.
  explicit Direction(std::vector<double> components);
  static Direction from_angle(double theta);
  static Direction normalized(std::vector<double> v);

  int dim() const noexcept { return static_cast<int>(components_.size()); }
  double operator[](int i) const { return components_[i]; }
  std::span<const double> components() const noexcept { return components_; }
  /// Polar angle in [0, 2π) for m = 2; 0 or π for m = 1.
  double angle() const;

private:
  std::vector<double> components_;
};

enum class BoundaryTag { Dirichlet, Neumann };

const char* to_string(BoundaryTag tag);

/// Neumann on Γ_ℓ = ∂(ℓω₁)×ω₂ (lateral faces, normal without ξ-part),
/// Dirichlet on γ_ℓ = ℓω₁×∂ω₂. Dirichlet wins on ties. Throws
/// GeometryError("interior facet") if the facet is not on ∂Ω_ℓ.
BoundaryTag classify_boundary_facet(const CylinderSpec& cyl, std::span<const double> centroid,
                                    std::span<const double> normal);

/// Index of the lateral face of ℓω₁ that the X-part of `point` lies on, or -1.
int lateral_face_of(const CylinderSpec& cyl, std::span<const double> point);

/// True iff X/r lies strictly inside ω₁ (boundary counts as outside).
bool point_in_scaled_base(const BaseSpec& base, double r, std::span<const double> X);

struct FaceNormal {
  Direction normal;
  int face_id;
};

/// One outward unit normal per face. Intervals give (+1, face 0 = right end)
/// and (-1, face 1 = left end); polygon face i is the edge v_i → v_{i+1}.
std::vector<FaceNormal> outward_normals(const BaseSpec& base);

/// Midpoint of face `face_id` of ω₁ (unscaled), as m coordinates.
std::vector<double> face_centroid(const BaseSpec& base, int face_id);

/// Length of polygon face `face_id` (1 for interval ends, by convention 0-dim).
double face_length(const BaseSpec& base, int face_id);

}  // namespace cylspec
