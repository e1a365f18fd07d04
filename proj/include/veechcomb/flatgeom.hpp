#pragma once

#include "veechcomb/numfield.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace veechcomb {

struct Vec2 {
  FieldElement x, y;

  Vec2() = default;
  Vec2(FieldElement x_, FieldElement y_) : x(std::move(x_)), y(std::move(y_)) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  friend Vec2 operator*(const FieldElement& s, const Vec2& v) { return {s * v.x, s * v.y}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
  bool is_zero() const { return x.is_zero() && y.is_zero(); }
  std::string to_string() const;
};

FieldElement cross(const Vec2& a, const Vec2& b);
FieldElement dot(const Vec2& a, const Vec2& b);
inline FieldElement norm2(const Vec2& a) { return dot(a, a); }

/// Real 2x2 matrix over a number field.
struct Mat2 {
  FieldElement a, b, c, d;
  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  FieldElement det() const { return a * d - b * c; }
  static Mat2 identity(const NumberField& f);
};

/// A slope, identified with its negative. Stored with the first nonzero
/// coordinate positive.
struct Direction {
  Vec2 vector;
  Direction() = default;
  explicit Direction(const Vec2& v);
  bool operator==(const Direction& o) const;
  /// Same direction class (parallel vectors).
  bool contains(const Vec2& v) const;
};

/// Angle position around a cone point: k*pi + angle(w) with w in the
/// half-open upper half plane. Ordered lexicographically.
struct LiftedAngle {
  long k = 0;
  Vec2 w;
};
int compare(const LiftedAngle& a, const LiftedAngle& b);

struct SurfaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPeriodic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// z2 -> sign * z2 + w carries edge e2 onto edge e1, reversing orientation.
struct Gluing {
  int e1 = 0, e2 = 0;
  int sign = 1;
  Vec2 w;
};

struct ConePoint {
  int id = 0;
  long multiple = 0;  // cone angle = multiple * pi
  bool marked = false;
  std::vector<int> corners;            // triangulation corners in counterclockwise order
  std::vector<LiftedAngle> corner_start;  // lifted angle of each corner's first edge
};

/// Triangle of the internal triangulation, in the coordinates of its polygon.
struct Triangle {
  int polygon = 0;
  std::array<Vec2, 3> v;
  std::array<int, 3> polygon_vertex{};  // index of each vertex in its polygon
};

/// Half-translation surface given by polygons and edge gluings. Immutable
/// after construction; the constructor validates everything.
///
/// Corner and half-edge ids coincide: 3 * triangle + k is both the edge from
/// vertex k to vertex k + 1 and the corner at vertex k.
class HalfTranslationSurface {
 public:
  HalfTranslationSurface(NumberField field, std::vector<std::vector<Vec2>> polygons, std::vector<Gluing> gluings,
                         std::vector<std::pair<int, int>> marked = {});

  const NumberField& field() const { return field_; }
  const std::vector<std::vector<Vec2>>& polygons() const { return polygons_; }
  const std::vector<Gluing>& gluings() const { return gluings_; }
  const std::vector<std::pair<int, int>>& marked() const { return marked_; }

  int edge_count() const { return static_cast<int>(edge_polygon_.size()); }
  int edge_id(int polygon, int index) const { return edge_offset_[polygon] + index; }
  std::pair<int, int> edge_location(int e) const { return {edge_polygon_[e], e - edge_offset_[edge_polygon_[e]]}; }
  /// Cone point at a polygon vertex.
  int vertex_class(int polygon, int vertex) const { return vertex_class_[polygon][vertex]; }

  int euler_char() const { return euler_char_; }
  int genus() const { return (2 - euler_char_) / 2; }
  const FieldElement& area() const { return area_; }
  const std::vector<ConePoint>& cone_points() const { return cones_; }

  const std::vector<Triangle>& triangles() const { return tris_; }
  int partner(int h) const { return partner_[h]; }
  /// Map from the partner triangle's frame into this triangle's frame.
  int partner_sign(int h) const { return partner_sign_[h]; }
  const Vec2& partner_shift(int h) const { return partner_shift_[h]; }
  int corner_cone(int c) const { return corner_cone_[c]; }
  int corner_position(int c) const { return corner_pos_[c]; }
  Vec2 corner_point(int c) const { return tris_[c / 3].v[c % 3]; }
  Vec2 corner_first(int c) const;  // outgoing edge of the corner
  Vec2 corner_last(int c) const;   // reversed incoming edge

  /// True when d lies in the half-open sector [first, last) of corner c.
  bool corner_contains(int c, const Vec2& d) const;
  LiftedAngle lifted_angle(int corner, const Vec2& d) const;
  /// Corner at (polygon, vertex) whose sector contains d.
  int locate_corner(int polygon, int vertex, const Vec2& d) const;

  Vec2 vec(long x, long y) const;
  FieldElement num(long x) const { return FieldElement(field_, Rational(x)); }

 private:
  void validate_and_build();

  NumberField field_;
  std::vector<std::vector<Vec2>> polygons_;
  std::vector<Gluing> gluings_;
  std::vector<std::pair<int, int>> marked_;

  std::vector<int> edge_offset_, edge_polygon_;
  std::vector<std::vector<int>> vertex_class_;
  int euler_char_ = 0;
  FieldElement area_;
  std::vector<ConePoint> cones_;

  std::vector<Triangle> tris_;
  std::vector<int> partner_, partner_sign_;
  std::vector<Vec2> partner_shift_;
  std::vector<int> corner_cone_, corner_pos_;
};

/// Two regular (2g+1)-gons of unit side glued along every pair of parallel
/// sides. Polygon 0 has its first side on [0, 1] x {0}; polygon 1 is its
/// point reflection through (1/2, 0).
HalfTranslationSurface build_double_polygon(int g);

struct SurfaceInvariants {
  int genus = 0;
  int euler_char = 0;
  std::vector<std::pair<int, long>> cone_points;  // (id, multiple of pi)
  bool gauss_bonnet = false;
};
SurfaceInvariants surface_invariants(const HalfTranslationSurface& s);

/// Straight segment between cone points through no other cone point.
/// Holonomy is measured in the frame of the starting corner's polygon.
struct SaddleConnection {
  int start = 0, end = 0;             // cone point ids
  int start_corner = 0, end_corner = 0;
  Vec2 holonomy;                       // start -> end
  Vec2 end_direction;                  // end -> start, in the end corner's frame
  std::vector<int> crossings;          // half-edges crossed, in order

  /// Identity of the underlying unoriented segment.
  bool same_as(const SaddleConnection& o) const;
};

/// Same segment traversed backwards.
SaddleConnection reverse(const HalfTranslationSurface& s, const SaddleConnection& sc);

/// Orders saddle connections by slope, then length, then start corner.
bool holonomy_less(const SaddleConnection& a, const SaddleConnection& b);

/// Returns the connection or its reverse, whichever has the smaller
/// (corner, holonomy) key. `flipped` reports whether it reversed.
SaddleConnection canonical(const HalfTranslationSurface& s, const SaddleConnection& sc, bool* flipped = nullptr);

/// Half-open sector [from, to) of slopes, measured counterclockwise mod pi.
struct Sector {
  Direction from, to;
  bool contains(const Vec2& v) const;
};

/// All saddle connections with |holonomy| <= bound, each once, sorted by
/// holonomy_less. `parallel` selects the OpenMP loop over starting corners.
std::vector<SaddleConnection> enumerate_saddle_connections(const HalfTranslationSurface& s,
                                                           const FieldElement& bound,
                                                           const std::optional<Sector>& sector = std::nullopt,
                                                           bool parallel = true);

/// Straight ray from a corner; stops at the first cone point it reaches.
/// Throws NotPeriodic after `budget` edge crossings.
SaddleConnection trace_from_corner(const HalfTranslationSurface& s, int corner, const Vec2& d, long budget = 10000);

struct OrientedConnection {
  int index = 0;  // into the decomposition spine
  bool reversed = false;
};

struct Cylinder {
  /// Lengths in units of |d| for the decomposition's representative d, so
  /// that area = circumference * width * |d|^2.
  FieldElement circumference, width, area;
  std::vector<OrientedConnection> bottom, top;  // boundary cycles, cylinder on the left
};

struct AnnularDecomposition {
  Direction direction;
  std::vector<SaddleConnection> spine;
  std::vector<Cylinder> cylinders;
  std::vector<std::vector<int>> components;  // spine indices per component

  FieldElement modulus(int i) const { return cylinders[i].circumference / cylinders[i].width; }
};

AnnularDecomposition cylinder_decomposition(const HalfTranslationSurface& s, const Direction& d, long budget = 10000);

/// Closed path of saddle connections, or the core curve of a cylinder.
struct GeodesicCycle {
  std::vector<SaddleConnection> path;  // oriented as traversed
  std::optional<int> core;             // cylinder index when this is a core curve
};

struct CornerWitness {
  int visit = -1;   // index into the path
  int point = -1;   // cone point id
  double left = 0, right = 0;  // angles in radians on the two sides
};

struct FlatGeodesicReport {
  bool geodesic = true;
  std::optional<CornerWitness> witness;
};

FlatGeodesicReport is_flat_geodesic(const HalfTranslationSurface& s, const GeodesicCycle& c);

struct BadSingularityReport {
  bool bad = false;
  int point = -1;
  std::vector<double> gaps;  // radians, counterclockwise from the first end
};

BadSingularityReport has_bad_singularity(const HalfTranslationSurface& s, const std::vector<SaddleConnection>& set);

bool contains_spine_component(const std::vector<SaddleConnection>& set, const AnnularDecomposition& dec, int j);

/// Affine automorphism: polygon p goes to polygon target[p] by
/// z -> sign[p] * D z + shift[p].
struct AffineAuto {
  Mat2 derivative;
  std::vector<int> target;
  std::vector<int> sign;
  std::vector<Vec2> shift;
};

/// Checks that the maps carry polygons onto polygons and gluings onto
/// gluings; returns the induced edge permutation.
std::vector<int> validate_affine(const HalfTranslationSurface& s, const AffineAuto& a);

AffineAuto identity_auto(const HalfTranslationSurface& s);
/// Rotation of each polygon of build_double_polygon(g) about its centre by
/// 2 pi / (2g+1).
AffineAuto rotation_auto(const HalfTranslationSurface& s, int g);

SaddleConnection apply_affine(const HalfTranslationSurface& s, const AffineAuto& a, const SaddleConnection& sc);
std::vector<SaddleConnection> apply_affine(const HalfTranslationSurface& s, const AffineAuto& a,
                                           const std::vector<SaddleConnection>& set);
AnnularDecomposition apply_affine(const HalfTranslationSurface& s, const AffineAuto& a,
                                  const AnnularDecomposition& dec);
GeodesicCycle apply_affine(const HalfTranslationSurface& s, const AffineAuto& a, const GeodesicCycle& c);

/// Every core of dec2 crosses the spine of dec1 transversely.
bool cores_intersect(const HalfTranslationSurface& s, const AnnularDecomposition& dec1,
                     const AnnularDecomposition& dec2, long budget = 10000);

}  // namespace veechcomb
