#include "veechcomb/flatgeom.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <tuple>

namespace veechcomb {

namespace {

int sgn(const FieldElement& x) { return x.sign(); }

Vec2 times_sign(int s, const Vec2& v) { return s > 0 ? v : -v; }

// Half-open upper half plane: y > 0, or y == 0 and x > 0.
bool in_upper(const Vec2& v) {
  int sy = sgn(v.y);
  return sy > 0 || (sy == 0 && sgn(v.x) > 0);
}
Vec2 to_upper(const Vec2& v) { return in_upper(v) ? v : -v; }

// Multiples of pi passed when turning counterclockwise from u to v, with the
// turn starting at the angle class of u in [0, pi).
long half_turns(const Vec2& u, const Vec2& v) {
  const bool up = in_upper(u);
  Vec2 u1 = up ? u : -u;
  Vec2 v1 = up ? v : -v;
  if (!in_upper(v1)) return 1;
  return sgn(cross(u1, v1)) < 0 ? 2 : 0;
}

double approx_angle(const LiftedAngle& a) {
  double t = std::atan2(a.w.y.approx(), a.w.x.approx());
  if (t < 0) t += M_PI;
  return static_cast<double>(a.k) * M_PI + t;
}

int lex_compare(const Vec2& a, const Vec2& b) {
  if (int c = compare(a.x, b.x)) return c;
  return compare(a.y, b.y);
}

bool in_closed_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  return sgn(cross(b - a, p - a)) >= 0 && sgn(cross(c - b, p - b)) >= 0 && sgn(cross(a - c, p - c)) >= 0;
}

// Squared distance from o to segment [a, b] exceeds r2.
bool segment_beyond(const Vec2& o, const Vec2& a, const Vec2& b, const FieldElement& r2) {
  Vec2 e = b - a;
  if (sgn(dot(o - a, e)) <= 0) return compare(norm2(o - a), r2) > 0;
  if (sgn(dot(o - b, e)) >= 0) return compare(norm2(o - b), r2) > 0;
  FieldElement c = cross(e, o - a);
  return compare(c * c, r2 * norm2(e)) > 0;
}

// z -> sign * z + shift
struct Chart {
  int sign = 1;
  Vec2 shift;
  Vec2 operator()(const Vec2& z) const { return times_sign(sign, z) + shift; }
  Vec2 linear(const Vec2& v) const { return times_sign(sign, v); }
  Chart after(int s2, const Vec2& w2) const { return {sign * s2, times_sign(sign, w2) + shift}; }
};

// Straight ray P + tau n walked through the triangulation in the developed
// frame of its starting triangle.
struct RayWalk {
  const HalfTranslationSurface& s;
  Vec2 P, n;
  int tri;
  Chart chart;

  struct Exit {
    bool vertex;
    int id;  // corner when vertex, else half-edge
  };

  std::array<Vec2, 3> developed() const {
    const auto& T = s.triangles()[tri];
    return {chart(T.v[0]), chart(T.v[1]), chart(T.v[2])};
  }

  Exit exit() const {
    auto V = developed();
    std::array<int, 3> o{};
    for (int k = 0; k < 3; ++k) o[k] = sgn(cross(n, V[k] - P));
    for (int k = 0; k < 3; ++k)
      if (o[k] == 0 && sgn(dot(V[k] - P, n)) > 0) return {true, 3 * tri + k};
    for (int k = 0; k < 3; ++k)
      if (o[k] < 0 && o[(k + 1) % 3] > 0) return {false, 3 * tri + k};
    throw std::logic_error("ray left the triangulation");
  }

  void cross_edge(int h) {
    chart = chart.after(s.partner_sign(h), s.partner_shift(h));
    tri = s.partner(h) / 3;
  }

  bool contains(const Vec2& q) const {
    auto V = developed();
    return in_closed_triangle(q, V[0], V[1], V[2]);
  }
};

struct Key {
  int corner;
  const Vec2* v;
};
int compare_keys(const Key& a, const Key& b) {
  if (a.corner != b.corner) return a.corner < b.corner ? -1 : 1;
  return lex_compare(*a.v, *b.v);
}

Key forward_key(const SaddleConnection& sc) { return {sc.start_corner, &sc.holonomy}; }
Key backward_key(const SaddleConnection& sc) { return {sc.end_corner, &sc.end_direction}; }

LiftedAngle start_angle(const HalfTranslationSurface& s, const SaddleConnection& sc) {
  return s.lifted_angle(sc.start_corner, sc.holonomy);
}
LiftedAngle end_angle(const HalfTranslationSurface& s, const SaddleConnection& sc) {
  return s.lifted_angle(sc.end_corner, sc.end_direction);
}

LiftedAngle plus_half_turns(const LiftedAngle& a, long m) { return {a.k + m, a.w}; }

}  // namespace

// ---------------------------------------------------------------------------
// Small types

std::string Vec2::to_string() const { return "(" + x.to_string() + ", " + y.to_string() + ")"; }

FieldElement cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
FieldElement dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

Mat2 Mat2::identity(const NumberField& f) {
  FieldElement one(f, Rational(1)), zero(f);
  return {one, zero, zero, one};
}

Direction::Direction(const Vec2& v) {
  if (v.is_zero()) throw std::invalid_argument("direction vector must be nonzero");
  int sx = sgn(v.x);
  vector = (sx > 0 || (sx == 0 && sgn(v.y) > 0)) ? v : -v;
}

bool Direction::operator==(const Direction& o) const { return cross(vector, o.vector).is_zero(); }

bool Direction::contains(const Vec2& v) const { return !v.is_zero() && cross(vector, v).is_zero(); }

int compare(const LiftedAngle& a, const LiftedAngle& b) {
  if (a.k != b.k) return a.k < b.k ? -1 : 1;
  return -sgn(cross(a.w, b.w));
}

bool Sector::contains(const Vec2& v) const {
  if (from == to) return true;
  const Vec2& f = from.vector;
  auto rel = [&](const Vec2& x) {
    int c = sgn(cross(f, x));
    return (c > 0 || (c == 0 && sgn(dot(f, x)) > 0)) ? x : -x;
  };
  Vec2 a = rel(v), b = rel(to.vector);
  if (sgn(cross(f, a)) == 0) return true;
  return sgn(cross(a, b)) > 0;
}

// ---------------------------------------------------------------------------
// Surface

HalfTranslationSurface::HalfTranslationSurface(NumberField field, std::vector<std::vector<Vec2>> polygons,
                                               std::vector<Gluing> gluings, std::vector<std::pair<int, int>> marked)
    : field_(std::move(field)),
      polygons_(std::move(polygons)),
      gluings_(std::move(gluings)),
      marked_(std::move(marked)),
      area_(field_) {
  validate_and_build();
}

Vec2 HalfTranslationSurface::vec(long x, long y) const { return {num(x), num(y)}; }

void HalfTranslationSurface::validate_and_build() {
  if (polygons_.empty()) throw SurfaceError("no polygons");
  const int P = static_cast<int>(polygons_.size());
  for (int p = 0; p < P; ++p) {
    const auto& poly = polygons_[p];
    if (poly.size() < 3) throw SurfaceError("polygon " + std::to_string(p) + " has fewer than 3 vertices");
    for (const auto& v : poly)
      if (!v.x.field().same_as(field_) || !v.y.field().same_as(field_))
        throw SurfaceError("polygon " + std::to_string(p) + " has coordinates outside the surface field");
    FieldElement twice(field_);
    for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    if (sgn(twice) <= 0) throw SurfaceError("polygon " + std::to_string(p) + " is not counterclockwise");
    area_ += twice / num(2);
    edge_offset_.push_back(static_cast<int>(edge_polygon_.size()));
    for (std::size_t i = 0; i < poly.size(); ++i) edge_polygon_.push_back(p);
  }
  const int E = edge_count();

  auto start_of = [&](int e) {
    auto [p, i] = edge_location(e);
    return polygons_[p][i];
  };
  auto end_of = [&](int e) {
    auto [p, i] = edge_location(e);
    return polygons_[p][(i + 1) % polygons_[p].size()];
  };

  std::vector<int> glued(E, -1);
  for (std::size_t gi = 0; gi < gluings_.size(); ++gi) {
    const auto& g = gluings_[gi];
    const std::string pair = "edges " + std::to_string(g.e1) + " and " + std::to_string(g.e2);
    if (g.e1 < 0 || g.e1 >= E || g.e2 < 0 || g.e2 >= E) throw SurfaceError("invalid gluing: " + pair + " out of range");
    if (g.e1 == g.e2) throw SurfaceError("invalid gluing: edge " + std::to_string(g.e1) + " glued to itself");
    if (g.sign != 1 && g.sign != -1) throw SurfaceError("invalid gluing: " + pair + " sign must be +1 or -1");
    if (glued[g.e1] >= 0 || glued[g.e2] >= 0) throw SurfaceError("invalid gluing: " + pair + " glued twice");
    glued[g.e1] = g.e2;
    glued[g.e2] = g.e1;
    if (!(times_sign(g.sign, start_of(g.e2)) + g.w == end_of(g.e1)) ||
        !(times_sign(g.sign, end_of(g.e2)) + g.w == start_of(g.e1)))
      throw SurfaceError("invalid gluing: " + pair + " holonomies do not match");
  }
  for (int e = 0; e < E; ++e)
    if (glued[e] < 0) throw SurfaceError("edge " + std::to_string(e) + " is not glued");

  // Ear-clipping triangulation of each polygon.
  std::map<std::tuple<int, int, int>, int> diagonal;
  std::vector<int> edge_half(E, -1);
  for (int p = 0; p < P; ++p) {
    const auto& poly = polygons_[p];
    const int n = static_cast<int>(poly.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::array<int, 3>> ears;
    while (idx.size() > 3) {
      const int m = static_cast<int>(idx.size());
      bool found = false;
      for (int i = 0; i < m && !found; ++i) {
        int a = idx[(i + m - 1) % m], b = idx[i], c = idx[(i + 1) % m];
        if (sgn(cross(poly[b] - poly[a], poly[c] - poly[b])) <= 0) continue;
        bool empty = true;
        for (int j : idx) {
          if (j == a || j == b || j == c) continue;
          if (in_closed_triangle(poly[j], poly[a], poly[b], poly[c])) {
            empty = false;
            break;
          }
        }
        if (!empty) continue;
        ears.push_back({a, b, c});
        idx.erase(idx.begin() + i);
        found = true;
      }
      if (!found) throw SurfaceError("polygon " + std::to_string(p) + " is not simple");
    }
    if (sgn(cross(poly[idx[1]] - poly[idx[0]], poly[idx[2]] - poly[idx[1]])) <= 0)
      throw SurfaceError("polygon " + std::to_string(p) + " is not simple");
    ears.push_back({idx[0], idx[1], idx[2]});
    for (const auto& ear : ears) {
      const int t = static_cast<int>(tris_.size());
      Triangle T;
      T.polygon = p;
      for (int k = 0; k < 3; ++k) {
        T.v[k] = poly[ear[k]];
        T.polygon_vertex[k] = ear[k];
      }
      tris_.push_back(T);
      for (int k = 0; k < 3; ++k) {
        int a = ear[k], b = ear[(k + 1) % 3];
        if (b == (a + 1) % n) {
          edge_half[edge_id(p, a)] = 3 * t + k;
        } else {
          diagonal[{p, a, b}] = 3 * t + k;
        }
      }
    }
  }

  const int H = 3 * static_cast<int>(tris_.size());
  partner_.assign(H, -1);
  partner_sign_.assign(H, 1);
  partner_shift_.assign(H, vec(0, 0));
  for (const auto& [key, h] : diagonal) {
    auto [p, a, b] = key;
    auto it = diagonal.find({p, b, a});
    if (it == diagonal.end()) throw std::logic_error("unpaired diagonal");
    partner_[h] = it->second;
  }
  for (const auto& g : gluings_) {
    int h1 = edge_half[g.e1], h2 = edge_half[g.e2];
    partner_[h1] = h2;
    partner_sign_[h1] = g.sign;
    partner_shift_[h1] = g.w;
    partner_[h2] = h1;
    partner_sign_[h2] = g.sign;
    partner_shift_[h2] = times_sign(g.sign, -g.w);
  }

  // Cone points: cycles of corners around each vertex class.
  corner_cone_.assign(H, -1);
  corner_pos_.assign(H, -1);
  for (int c0 = 0; c0 < H; ++c0) {
    if (corner_cone_[c0] >= 0) continue;
    ConePoint cp;
    cp.id = static_cast<int>(cones_.size());
    int c = c0;
    LiftedAngle a{0, to_upper(corner_first(c0))};
    do {
      if (static_cast<int>(cp.corners.size()) > H) throw std::logic_error("corner cycle does not close");
      corner_cone_[c] = cp.id;
      corner_pos_[c] = static_cast<int>(cp.corners.size());
      cp.corners.push_back(c);
      cp.corner_start.push_back(a);
      Vec2 last = corner_last(c);
      a = {a.k + half_turns(corner_first(c), last), to_upper(last)};
      c = partner_[3 * (c / 3) + (c % 3 + 2) % 3];
    } while (c != c0);
    cp.multiple = a.k;
    cones_.push_back(std::move(cp));
  }

  vertex_class_.assign(P, {});
  for (int p = 0; p < P; ++p) vertex_class_[p].assign(polygons_[p].size(), -1);
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    for (int k = 0; k < 3; ++k) vertex_class_[tris_[t].polygon][tris_[t].polygon_vertex[k]] = corner_cone_[3 * t + k];

  for (auto [p, v] : marked_) {
    if (p < 0 || p >= P || v < 0 || v >= static_cast<int>(polygons_[p].size()))
      throw SurfaceError("marked point (" + std::to_string(p) + ", " + std::to_string(v) + ") is not a vertex");
    cones_[vertex_class_[p][v]].marked = true;
  }
  for (const auto& cp : cones_)
    if (!cp.marked && cp.multiple < 3)
      throw SurfaceError("cone point " + std::to_string(cp.id) + " has cone angle " + std::to_string(cp.multiple) +
                         " pi; unmarked points need at least 3 pi");

  const int V = static_cast<int>(cones_.size());
  euler_char_ = V - static_cast<int>(gluings_.size()) + P;
  long gb = 0;
  for (const auto& cp : cones_) gb += 2 - cp.multiple;
  if (gb != 2L * euler_char_) throw std::logic_error("Gauss-Bonnet fails");
}

Vec2 HalfTranslationSurface::corner_first(int c) const {
  const auto& T = tris_[c / 3];
  return T.v[(c % 3 + 1) % 3] - T.v[c % 3];
}

Vec2 HalfTranslationSurface::corner_last(int c) const {
  const auto& T = tris_[c / 3];
  return T.v[(c % 3 + 2) % 3] - T.v[c % 3];
}

bool HalfTranslationSurface::corner_contains(int c, const Vec2& d) const {
  Vec2 u = corner_first(c), v = corner_last(c);
  int a = sgn(cross(u, d));
  if (a == 0) return sgn(dot(u, d)) > 0;
  return a > 0 && sgn(cross(d, v)) > 0;
}

LiftedAngle HalfTranslationSurface::lifted_angle(int corner, const Vec2& d) const {
  const auto& cp = cones_[corner_cone_[corner]];
  const auto& base = cp.corner_start[corner_pos_[corner]];
  long k = (base.k + half_turns(corner_first(corner), d)) % cp.multiple;
  return {k, to_upper(d)};
}

int HalfTranslationSurface::locate_corner(int polygon, int vertex, const Vec2& d) const {
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (tris_[t].polygon != polygon) continue;
    for (int k = 0; k < 3; ++k)
      if (tris_[t].polygon_vertex[k] == vertex && corner_contains(3 * t + k, d)) return 3 * t + k;
  }
  throw std::logic_error("no corner contains the direction");
}

// ---------------------------------------------------------------------------

HalfTranslationSurface build_double_polygon(int g) {
  if (g < 2) throw std::invalid_argument("genus must be at least 2");
  const int n = 2 * g + 1;
  NumberField F = field_2cos_pi_over(2 * n);
  const FieldElement half(F, Rational(1, 2));
  auto cos_k = [&](long k) { return half * two_cos_multiple(F, 2 * n, 4 * k); };
  auto sin_k = [&](long k) { return half * two_cos_multiple(F, 2 * n, n - 4 * k); };
  const Vec2 origin{FieldElement(F), FieldElement(F)};
  const Vec2 c{FieldElement(F, Rational(1)), FieldElement(F)};

  std::vector<Vec2> U{origin};
  for (int k = 0; k + 1 < n; ++k) U.push_back(U.back() + Vec2{cos_k(k), sin_k(k)});
  if (!(U.back() + Vec2{cos_k(n - 1), sin_k(n - 1)} == origin)) throw std::logic_error("polygon does not close");
  std::vector<Vec2> L;
  for (const auto& u : U) L.push_back(c - u);

  std::vector<Gluing> gl;
  for (int i = 0; i < n; ++i) gl.push_back({i, n + i, 1, U[(i + 1) % n] + U[i] - c});
  return HalfTranslationSurface(F, {U, L}, gl);
}

SurfaceInvariants surface_invariants(const HalfTranslationSurface& s) {
  SurfaceInvariants inv;
  inv.genus = s.genus();
  inv.euler_char = s.euler_char();
  long gb = 0;
  for (const auto& cp : s.cone_points()) {
    inv.cone_points.emplace_back(cp.id, cp.multiple);
    gb += 2 - cp.multiple;
  }
  inv.gauss_bonnet = gb == 2L * inv.euler_char;
  return inv;
}

// ---------------------------------------------------------------------------
// Saddle connections

bool SaddleConnection::same_as(const SaddleConnection& o) const {
  return compare_keys(forward_key(*this), forward_key(o)) == 0 ||
         compare_keys(forward_key(*this), backward_key(o)) == 0;
}

SaddleConnection reverse(const HalfTranslationSurface& s, const SaddleConnection& sc) {
  SaddleConnection r;
  r.start = sc.end;
  r.end = sc.start;
  r.start_corner = sc.end_corner;
  r.end_corner = sc.start_corner;
  r.holonomy = sc.end_direction;
  r.end_direction = sc.holonomy;
  for (auto it = sc.crossings.rbegin(); it != sc.crossings.rend(); ++it) r.crossings.push_back(s.partner(*it));
  return r;
}

SaddleConnection canonical(const HalfTranslationSurface& s, const SaddleConnection& sc, bool* flipped) {
  bool flip = compare_keys(backward_key(sc), forward_key(sc)) < 0;
  if (flipped) *flipped = flip;
  return flip ? reverse(s, sc) : sc;
}

bool holonomy_less(const SaddleConnection& a, const SaddleConnection& b) {
  Vec2 wa = to_upper(a.holonomy), wb = to_upper(b.holonomy);
  if (int c = sgn(cross(wa, wb))) return c > 0;
  if (int c = compare(norm2(a.holonomy), norm2(b.holonomy))) return c < 0;
  if (a.start_corner != b.start_corner) return a.start_corner < b.start_corner;
  if (a.end_corner != b.end_corner) return a.end_corner < b.end_corner;
  return lex_compare(a.holonomy, b.holonomy) < 0;
}

SaddleConnection trace_from_corner(const HalfTranslationSurface& s, int corner, const Vec2& d, long budget) {
  if (!s.corner_contains(corner, d)) throw std::invalid_argument("direction is not in the corner");
  const int t = corner / 3, k = corner % 3;
  const Vec2 O = s.corner_point(corner);
  RayWalk w{s, O, d, t, Chart{1, s.vec(0, 0)}};
  SaddleConnection sc;
  sc.start = s.corner_cone(corner);
  sc.start_corner = corner;
  for (long steps = 0;; ++steps) {
    auto ex = w.exit();
    if (ex.vertex) {
      const Vec2 C = w.chart(s.corner_point(ex.id));
      sc.holonomy = C - O;
      sc.end = s.corner_cone(ex.id);
      if (sc.crossings.empty() && ex.id == 3 * t + (k + 1) % 3) {
        sc.end_corner = s.partner(corner);
        sc.end_direction = s.corner_first(sc.end_corner);
      } else {
        sc.end_corner = ex.id;
        sc.end_direction = w.chart.linear(O - C);
      }
      return sc;
    }
    if (steps >= budget) throw NotPeriodic("not an annular decomposition direction: budget exceeded");
    sc.crossings.push_back(ex.id);
    w.cross_edge(ex.id);
  }
}

namespace {

void enumerate_from(const HalfTranslationSurface& s, int corner, const FieldElement& L2,
                    std::vector<SaddleConnection>& out) {
  const int t = corner / 3, k = corner % 3;
  const Vec2 O = s.corner_point(corner);
  const Vec2 u = s.corner_first(corner), v = s.corner_last(corner);
  const int cone = s.corner_cone(corner);

  if (compare(norm2(u), L2) <= 0) {
    SaddleConnection sc;
    sc.start = cone;
    sc.start_corner = corner;
    sc.end_corner = s.partner(corner);
    sc.end = s.corner_cone(sc.end_corner);
    sc.holonomy = u;
    sc.end_direction = s.corner_first(sc.end_corner);
    out.push_back(std::move(sc));
  }

  struct Item {
    int tri;
    Chart chart;
    int entry;
    Vec2 right, left;
    std::vector<int> path;
  };
  std::vector<Item> stack;
  auto push = [&](const Item& from, int h, const Vec2& right, const Vec2& left) {
    Item it{s.partner(h) / 3, from.chart.after(s.partner_sign(h), s.partner_shift(h)), s.partner(h), right, left,
            from.path};
    it.path.push_back(h);
    stack.push_back(std::move(it));
  };

  const auto& T0 = s.triangles()[t];
  Item root{t, Chart{1, s.vec(0, 0)}, -1, u, v, {}};
  if (!segment_beyond(O, T0.v[(k + 1) % 3], T0.v[(k + 2) % 3], L2)) push(root, 3 * t + (k + 1) % 3, u, v);

  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const auto& T = s.triangles()[it.tri];
    const int j = it.entry % 3;
    const Vec2 R = it.chart(T.v[(j + 1) % 3]), Lf = it.chart(T.v[j]), C = it.chart(T.v[(j + 2) % 3]);
    const Vec2 cv = C - O;
    const int a = sgn(cross(it.right, cv)), b = sgn(cross(cv, it.left));
    const int h_right = 3 * it.tri + (j + 1) % 3, h_left = 3 * it.tri + (j + 2) % 3;
    if (a > 0 && b > 0) {
      if (compare(norm2(cv), L2) <= 0) {
        SaddleConnection sc;
        sc.start = cone;
        sc.start_corner = corner;
        sc.end_corner = 3 * it.tri + (j + 2) % 3;
        sc.end = s.corner_cone(sc.end_corner);
        sc.holonomy = cv;
        sc.end_direction = it.chart.linear(O - C);
        sc.crossings = it.path;
        out.push_back(std::move(sc));
      }
      if (!segment_beyond(O, R, C, L2)) push(it, h_right, it.right, cv);
      if (!segment_beyond(O, C, Lf, L2)) push(it, h_left, cv, it.left);
    } else if (a <= 0) {
      if (!segment_beyond(O, C, Lf, L2)) push(it, h_left, it.right, it.left);
    } else {
      if (!segment_beyond(O, R, C, L2)) push(it, h_right, it.right, it.left);
    }
  }
}

}  // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(const HalfTranslationSurface& s, const FieldElement& bound,
                                                           const std::optional<Sector>& sector, bool parallel) {
  if (sgn(bound) <= 0) throw std::invalid_argument("length bound must be positive");
  const FieldElement L2 = bound * bound;
  const int corners = 3 * static_cast<int>(s.triangles().size());
  std::vector<std::vector<SaddleConnection>> found(corners);
  std::vector<std::exception_ptr> errors(corners);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int c = 0; c < corners; ++c) {
    try {
      std::vector<SaddleConnection> local;
      enumerate_from(s, c, L2, local);
      for (auto& sc : local) {
        if (compare_keys(forward_key(sc), backward_key(sc)) > 0) continue;
        if (sector && !sector->contains(sc.holonomy)) continue;
        found[c].push_back(std::move(sc));
      }
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<SaddleConnection> all;
  for (auto& f : found)
    for (auto& sc : f) all.push_back(std::move(sc));
  std::sort(all.begin(), all.end(), holonomy_less);
  return all;
}

// ---------------------------------------------------------------------------
// Cylinders

namespace {

struct Piece {
  int sc;
  Vec2 a, b;  // full segment of the connection in the triangle's frame
};

// Segments of each connection, indexed by triangle.
std::vector<std::vector<Piece>> pieces_by_triangle(const HalfTranslationSurface& s,
                                                   const std::vector<SaddleConnection>& set) {
  std::vector<std::vector<Piece>> out(s.triangles().size());
  for (int i = 0; i < static_cast<int>(set.size()); ++i) {
    const auto& sc = set[i];
    const Vec2 O = s.corner_point(sc.start_corner), E = O + sc.holonomy;
    int tri = sc.start_corner / 3;
    Chart chart{1, s.vec(0, 0)};
    auto add = [&]() {
      // inverse chart: z -> sign (z - shift)
      out[tri].push_back({i, times_sign(chart.sign, O - chart.shift), times_sign(chart.sign, E - chart.shift)});
    };
    add();
    for (int h : sc.crossings) {
      chart = chart.after(s.partner_sign(h), s.partner_shift(h));
      tri = s.partner(h) / 3;
      add();
    }
  }
  return out;
}

struct Hit {
  FieldElement tau;
  int sc;
  Vec2 dir;  // developed direction of the connection
};

// First intersection with a piece in the walker's current triangle, tau in (lo, hi].
std::optional<Hit> piece_hit(const RayWalk& w, const std::vector<Piece>& pieces, const FieldElement* hi) {
  std::optional<Hit> best;
  auto V = w.developed();
  for (const auto& pc : pieces) {
    Vec2 A = w.chart(pc.a), B = w.chart(pc.b), e = B - A;
    FieldElement den = cross(w.n, e);
    if (den.is_zero()) continue;
    FieldElement tau = cross(A - w.P, e) / den;
    if (sgn(tau) <= 0) continue;
    if (hi && compare(tau, *hi) > 0) continue;
    FieldElement sig = cross(A - w.P, w.n) / den;
    if (sgn(sig) < 0 || compare(sig, FieldElement(sig.field(), Rational(1))) > 0) continue;
    Vec2 X = w.P + tau * w.n;
    if (!in_closed_triangle(X, V[0], V[1], V[2])) continue;
    if (!best || compare(tau, best->tau) < 0) best = Hit{tau, pc.sc, e};
  }
  return best;
}

struct EndRecord {
  LiftedAngle angle;
  int sc;
  bool reversed;  // outgoing orientation through this end
};

struct Probe {
  RayWalk walk;
  FieldElement t;  // |holonomy| in units of |d|
};

// Point on oriented connection (i, rev) with the normal pointing to its left.
Probe start_probe(const HalfTranslationSurface& s, const SaddleConnection& sc, bool rev, const Vec2& d) {
  const int t = sc.start_corner / 3, k = sc.start_corner % 3;
  const Vec2 O = s.corner_point(sc.start_corner);
  const Vec2& hol = sc.holonomy;
  Vec2 n{-hol.y, hol.x};
  if (rev) n = -n;
  FieldElement tt = abs(dot(hol, d) / norm2(d));
  if (sc.crossings.empty()) {
    Vec2 X = O + FieldElement(s.field(), Rational(1, 2)) * hol;
    if (sgn(cross(hol, n)) > 0) return {RayWalk{s, X, n, t, Chart{1, s.vec(0, 0)}}, tt};
    const int h = sc.start_corner;
    Chart ch = Chart{1, s.vec(0, 0)}.after(s.partner_sign(h), s.partner_shift(h));
    return {RayWalk{s, X, n, s.partner(h) / 3, ch}, tt};
  }
  const auto& T = s.triangles()[t];
  const Vec2 A = T.v[(k + 1) % 3], B = T.v[(k + 2) % 3];
  FieldElement tau1 = cross(A - O, B - A) / cross(hol, B - A);
  Vec2 X = O + (tau1 / s.num(2)) * hol;
  return {RayWalk{s, X, n, t, Chart{1, s.vec(0, 0)}}, tt};
}

}  // namespace

AnnularDecomposition cylinder_decomposition(const HalfTranslationSurface& s, const Direction& d, long budget) {
  AnnularDecomposition dec;
  dec.direction = d;
  const Vec2& dv = d.vector;
  const int corners = 3 * static_cast<int>(s.triangles().size());
  for (int c = 0; c < corners; ++c) {
    for (const Vec2& sigma : {dv, -dv}) {
      if (!s.corner_contains(c, sigma)) continue;
      SaddleConnection sc;
      try {
        sc = trace_from_corner(s, c, sigma, budget);
      } catch (const NotPeriodic&) {
        throw NotPeriodic("not an annular decomposition direction");
      }
      sc = canonical(s, sc);
      bool dup = false;
      for (const auto& x : dec.spine)
        if (x.same_as(sc)) dup = true;
      if (!dup) dec.spine.push_back(std::move(sc));
    }
  }
  std::sort(dec.spine.begin(), dec.spine.end(), holonomy_less);
  const int N = static_cast<int>(dec.spine.size());

  // Ends around each cone point, counterclockwise.
  const int V = static_cast<int>(s.cone_points().size());
  std::vector<std::vector<EndRecord>> ends(V);
  for (int i = 0; i < N; ++i) {
    const auto& sc = dec.spine[i];
    ends[sc.start].push_back({start_angle(s, sc), i, false});
    ends[sc.end].push_back({end_angle(s, sc), i, true});
  }
  // position of the end through which (i, rev) leaves
  std::vector<std::array<std::pair<int, int>, 2>> where(N);
  for (int p = 0; p < V; ++p) {
    std::sort(ends[p].begin(), ends[p].end(),
              [](const EndRecord& a, const EndRecord& b) { return compare(a.angle, b.angle) < 0; });
    for (int j = 0; j < static_cast<int>(ends[p].size()); ++j)
      where[ends[p][j].sc][ends[p][j].reversed ? 1 : 0] = {p, j};
  }
  auto id = [](int i, bool rev) { return 2 * i + (rev ? 1 : 0); };
  std::vector<int> next(2 * N);
  for (int i = 0; i < N; ++i)
    for (int r = 0; r < 2; ++r) {
      auto [p, j] = where[i][1 - r];  // arrival end
      const auto& lst = ends[p];
      const auto& e = lst[(j + lst.size() - 1) % lst.size()];
      next[id(i, r)] = id(e.sc, e.reversed);
    }
  std::vector<int> cycle_of(2 * N, -1);
  std::vector<std::vector<int>> cycles;
  for (int x = 0; x < 2 * N; ++x) {
    if (cycle_of[x] >= 0) continue;
    std::vector<int> cyc;
    for (int y = x; cycle_of[y] < 0; y = next[y]) {
      cycle_of[y] = static_cast<int>(cycles.size());
      cyc.push_back(y);
    }
    cycles.push_back(std::move(cyc));
  }

  std::vector<FieldElement> tlen(N);
  for (int i = 0; i < N; ++i) tlen[i] = abs(dot(dec.spine[i].holonomy, dv) / norm2(dv));
  auto circumference = [&](int cyc) {
    FieldElement c(s.field());
    for (int x : cycles[cyc]) c += tlen[x / 2];
    return c;
  };
  auto oriented = [&](int cyc) {
    std::vector<OrientedConnection> out;
    for (int x : cycles[cyc]) out.push_back({x / 2, (x % 2) == 1});
    return out;
  };

  auto pieces = pieces_by_triangle(s, dec.spine);
  std::vector<bool> paired(cycles.size(), false);
  FieldElement total(s.field());
  for (int X = 0; X < static_cast<int>(cycles.size()); ++X) {
    if (paired[X]) continue;
    const int first = cycles[X].front();
    const auto& sc = dec.spine[first / 2];
    Probe pr = start_probe(s, sc, first % 2 == 1, dv);
    RayWalk& w = pr.walk;
    FieldElement tau_star(s.field());
    int hit = -1;
    for (long steps = 0;; ++steps) {
      auto best = piece_hit(w, pieces[w.tri], nullptr);
      auto ex = w.exit();
      if (ex.vertex) {
        const Vec2 C = w.chart(s.corner_point(ex.id));
        FieldElement tau_c = dot(C - w.P, w.n) / norm2(w.n);
        if (best && compare(best->tau, tau_c) < 0) {
          tau_star = best->tau;
          hit = id(best->sc, sgn(cross(best->dir, -w.n)) <= 0);
        } else {
          tau_star = tau_c;
          LiftedAngle la = s.lifted_angle(ex.id, w.chart.linear(-w.n));
          const auto& lst = ends[s.corner_cone(ex.id)];
          int a = static_cast<int>(lst.size()) - 1;
          for (int j = 0; j < static_cast<int>(lst.size()); ++j)
            if (compare(lst[j].angle, la) < 0) a = j;
          hit = id(lst[a].sc, lst[a].reversed);
        }
        break;
      }
      if (best) {
        tau_star = best->tau;
        hit = id(best->sc, sgn(cross(best->dir, -w.n)) <= 0);
        break;
      }
      if (steps >= budget) throw NotPeriodic("not an annular decomposition direction: width probe budget exceeded");
      w.cross_edge(ex.id);
    }
    const int Y = cycle_of[hit];
    if (Y == X || paired[Y]) throw std::logic_error("cylinder boundaries do not pair up");
    Cylinder cyl;
    cyl.circumference = circumference(X);
    if (!(cyl.circumference == circumference(Y))) throw std::logic_error("cylinder boundaries differ in length");
    cyl.width = tau_star * pr.t;
    cyl.area = cyl.circumference * cyl.width * norm2(dv);
    cyl.bottom = oriented(X);
    cyl.top = oriented(Y);
    total += cyl.area;
    paired[X] = paired[Y] = true;
    dec.cylinders.push_back(std::move(cyl));
  }
  if (!(total == s.area())) throw std::logic_error("cylinders do not tile the surface");

  // Components of the spine as a graph on cone points.
  std::vector<int> parent(V);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& sc : dec.spine) parent[find(sc.start)] = find(sc.end);
  std::map<int, int> comp_index;
  for (int i = 0; i < N; ++i) {
    int r = find(dec.spine[i].start);
    auto [it, fresh] = comp_index.emplace(r, static_cast<int>(dec.components.size()));
    if (fresh) dec.components.emplace_back();
    dec.components[it->second].push_back(i);
  }
  return dec;
}

// ---------------------------------------------------------------------------
// Angle tests

FlatGeodesicReport is_flat_geodesic(const HalfTranslationSurface& s, const GeodesicCycle& c) {
  FlatGeodesicReport rep;
  if (c.core) return rep;
  const auto& path = c.path;
  if (path.empty()) throw std::invalid_argument("empty cycle");
  const int n = static_cast<int>(path.size());
  for (int i = 0; i < n; ++i)
    if (path[i].end != path[(i + 1) % n].start) throw std::invalid_argument("path is not a closed edge path");
  for (int i = 0; i < n; ++i) {
    const auto& a = path[i];
    const auto& b = path[(i + 1) % n];
    const auto& cp = s.cone_points()[a.end];
    const long M = cp.multiple;
    LiftedAngle in = end_angle(s, a), out = start_angle(s, b);
    int cmp = compare(out, in);
    if (cmp < 0) out.k += M;
    bool left_ok, right_ok;
    double left, right;
    if (cmp == 0) {
      left_ok = false;
      right_ok = M >= 1;
      left = 0;
      right = static_cast<double>(M) * M_PI;
    } else {
      left_ok = compare(out, plus_half_turns(in, 1)) >= 0;
      right_ok = compare(out, plus_half_turns(in, M - 1)) <= 0;
      left = approx_angle(out) - approx_angle(in);
      right = static_cast<double>(M) * M_PI - left;
    }
    bool ok = cp.marked ? (left_ok || right_ok) : (left_ok && right_ok);
    if (!ok) {
      rep.geodesic = false;
      rep.witness = CornerWitness{i, a.end, left, right};
      return rep;
    }
  }
  return rep;
}

BadSingularityReport has_bad_singularity(const HalfTranslationSurface& s, const std::vector<SaddleConnection>& set) {
  std::vector<SaddleConnection> uniq;
  for (const auto& sc : set) {
    bool dup = false;
    for (const auto& u : uniq)
      if (u.same_as(sc)) dup = true;
    if (!dup) uniq.push_back(sc);
  }
  const int V = static_cast<int>(s.cone_points().size());
  std::vector<std::vector<LiftedAngle>> ends(V);
  for (const auto& sc : uniq) {
    ends[sc.start].push_back(start_angle(s, sc));
    ends[sc.end].push_back(end_angle(s, sc));
  }
  BadSingularityReport rep;
  for (int p = 0; p < V; ++p) {
    auto& e = ends[p];
    if (e.empty()) continue;
    std::sort(e.begin(), e.end(), [](const LiftedAngle& a, const LiftedAngle& b) { return compare(a, b) < 0; });
    const long M = s.cone_points()[p].multiple;
    bool all_small = true;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < e.size(); ++i) {
      LiftedAngle nx = e[(i + 1) % e.size()];
      if (i + 1 == e.size()) nx.k += M;
      if (compare(nx, plus_half_turns(e[i], 1)) >= 0) all_small = false;
      gaps.push_back(approx_angle(nx) - approx_angle(e[i]));
    }
    if (all_small) {
      rep.bad = true;
      rep.point = p;
      rep.gaps = std::move(gaps);
      return rep;
    }
  }
  return rep;
}

bool contains_spine_component(const std::vector<SaddleConnection>& set, const AnnularDecomposition& dec, int j) {
  if (j < 0 || j >= static_cast<int>(dec.components.size())) throw std::out_of_range("bad spine component index");
  for (int i : dec.components[j]) {
    bool found = false;
    for (const auto& sc : set)
      if (sc.same_as(dec.spine[i])) found = true;
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Affine maps

namespace {

Vec2 image_point(const AffineAuto& a, int p, const Vec2& z) {
  return times_sign(a.sign[p], a.derivative * z) + a.shift[p];
}

int find_vertex(const std::vector<Vec2>& poly, const Vec2& z) {
  for (int j = 0; j < static_cast<int>(poly.size()); ++j)
    if (poly[j] == z) return j;
  return -1;
}

}  // namespace

std::vector<int> validate_affine(const HalfTranslationSurface& s, const AffineAuto& a) {
  const int P = static_cast<int>(s.polygons().size());
  if (static_cast<int>(a.target.size()) != P || static_cast<int>(a.sign.size()) != P ||
      static_cast<int>(a.shift.size()) != P)
    throw std::invalid_argument("affine map needs one entry per polygon");
  if (!(a.derivative.det() == s.num(1))) throw std::invalid_argument("derivative must have determinant 1");
  std::vector<int> perm(s.edge_count(), -1);
  std::vector<bool> hit(P, false);
  for (int p = 0; p < P; ++p) {
    int q = a.target[p];
    if (q < 0 || q >= P || hit[q]) throw std::invalid_argument("polygon map is not a permutation");
    hit[q] = true;
    const auto& src = s.polygons()[p];
    const auto& dst = s.polygons()[q];
    if (src.size() != dst.size()) throw std::invalid_argument("polygon sizes differ");
    const int n = static_cast<int>(src.size());
    int m = find_vertex(dst, image_point(a, p, src[0]));
    if (m < 0) throw std::invalid_argument("polygon " + std::to_string(p) + " is not mapped onto a polygon");
    for (int i = 0; i < n; ++i) {
      if (!(image_point(a, p, src[i]) == dst[(i + m) % n]))
        throw std::invalid_argument("polygon " + std::to_string(p) + " is not mapped onto a polygon");
      perm[s.edge_id(p, i)] = s.edge_id(q, (i + m) % n);
    }
  }
  std::vector<int> glued(s.edge_count());
  for (const auto& g : s.gluings()) {
    glued[g.e1] = g.e2;
    glued[g.e2] = g.e1;
  }
  for (const auto& g : s.gluings())
    if (glued[perm[g.e1]] != perm[g.e2])
      throw std::invalid_argument("edge permutation is inconsistent with the gluing of edges " +
                                  std::to_string(g.e1) + " and " + std::to_string(g.e2));
  return perm;
}

AffineAuto identity_auto(const HalfTranslationSurface& s) {
  AffineAuto a;
  a.derivative = Mat2::identity(s.field());
  for (int p = 0; p < static_cast<int>(s.polygons().size()); ++p) {
    a.target.push_back(p);
    a.sign.push_back(1);
    a.shift.push_back(s.vec(0, 0));
  }
  return a;
}

AffineAuto rotation_auto(const HalfTranslationSurface& s, int g) {
  const int n = 2 * g + 1;
  const NumberField& F = s.field();
  const FieldElement half(F, Rational(1, 2));
  FieldElement c = half * two_cos_multiple(F, 2 * n, 4), sn = half * two_cos_multiple(F, 2 * n, n - 4);
  AffineAuto a;
  a.derivative = {c, -sn, sn, c};
  a.target = {0, 1};
  a.sign = {1, 1};
  a.shift = {s.vec(1, 0), Vec2{-c, -sn}};
  validate_affine(s, a);
  return a;
}

SaddleConnection apply_affine(const HalfTranslationSurface& s, const AffineAuto& a, const SaddleConnection& sc) {
  const auto& T = s.triangles()[sc.start_corner / 3];
  const int p = T.polygon;
  const Vec2& z = s.polygons()[p][T.polygon_vertex[sc.start_corner % 3]];
  const int q = a.target.at(p);
  const int j = find_vertex(s.polygons()[q], image_point(a, p, z));
  if (j < 0) throw std::invalid_argument("map does not carry vertices to vertices");
  const Vec2 d = times_sign(a.sign[p], a.derivative * sc.holonomy);
  const int corner = s.locate_corner(q, j, d);
  SaddleConnection out = trace_from_corner(s, corner, d, 1L << 40);
  if (!(out.holonomy == d)) throw std::invalid_argument("map is not an automorphism: image is not a saddle connection");
  return out;
}

std::vector<SaddleConnection> apply_affine(const HalfTranslationSurface& s, const AffineAuto& a,
                                           const std::vector<SaddleConnection>& set) {
  std::vector<SaddleConnection> out;
  for (const auto& sc : set) out.push_back(canonical(s, apply_affine(s, a, sc)));
  std::sort(out.begin(), out.end(), holonomy_less);
  return out;
}

AnnularDecomposition apply_affine(const HalfTranslationSurface& s, const AffineAuto& a,
                                  const AnnularDecomposition& dec) {
  AnnularDecomposition out;
  out.direction = Direction(a.derivative * dec.direction.vector);
  std::vector<bool> flip(dec.spine.size());
  for (std::size_t i = 0; i < dec.spine.size(); ++i) {
    bool f = false;
    out.spine.push_back(canonical(s, apply_affine(s, a, dec.spine[i]), &f));
    flip[i] = f;
  }
  auto map_cycle = [&](const std::vector<OrientedConnection>& cyc) {
    std::vector<OrientedConnection> r;
    for (const auto& oc : cyc) r.push_back({oc.index, oc.reversed != flip[oc.index]});
    return r;
  };
  const FieldElement d2 = norm2(out.direction.vector);
  for (const auto& cyl : dec.cylinders) {
    Cylinder c;
    c.circumference = cyl.circumference;
    c.area = cyl.area;
    c.width = cyl.area / (cyl.circumference * d2);
    c.bottom = map_cycle(cyl.bottom);
    c.top = map_cycle(cyl.top);
    out.cylinders.push_back(std::move(c));
  }
  out.components = dec.components;
  return out;
}

GeodesicCycle apply_affine(const HalfTranslationSurface& s, const AffineAuto& a, const GeodesicCycle& c) {
  GeodesicCycle out;
  out.core = c.core;
  for (const auto& sc : c.path) out.path.push_back(apply_affine(s, a, sc));
  return out;
}

bool cores_intersect(const HalfTranslationSurface& s, const AnnularDecomposition& dec1,
                     const AnnularDecomposition& dec2, long budget) {
  if (dec1.direction == dec2.direction) return false;
  auto pieces = pieces_by_triangle(s, dec1.spine);
  const Vec2& dv = dec2.direction.vector;
  for (const auto& cyl : dec2.cylinders) {
    const auto& first = cyl.bottom.front();
    const auto& sc = dec2.spine[first.index];
    Probe pr = start_probe(s, sc, first.reversed, dv);
    RayWalk& w = pr.walk;
    // Move half the width into the cylinder.
    const Vec2 Q = w.P + (cyl.width / (s.num(2) * pr.t)) * w.n;
    long steps = 0;
    while (!w.contains(Q)) {
      auto ex = w.exit();
      if (ex.vertex || ++steps > budget) throw std::logic_error("core start point not reached");
      w.cross_edge(ex.id);
    }
    // Closed leaf through Q.
    FieldElement t_signed = dot(sc.holonomy, dv) / norm2(dv);
    const Vec2 step = (cyl.circumference / t_signed) * sc.holonomy;
    RayWalk core{s, Q, step, w.tri, w.chart};
    const FieldElement one = s.num(1);
    long crossings = 0;
    for (steps = 0;; ++steps) {
      auto V = core.developed();
      for (const auto& pc : pieces[core.tri]) {
        Vec2 A = core.chart(pc.a), B = core.chart(pc.b), e = B - A;
        FieldElement den = cross(core.n, e);
        if (den.is_zero()) continue;
        FieldElement tau = cross(A - core.P, e) / den;
        if (sgn(tau) <= 0 || compare(tau, one) > 0) continue;
        FieldElement sig = cross(A - core.P, core.n) / den;
        if (sgn(sig) < 0 || compare(sig, one) > 0) continue;
        if (!in_closed_triangle(core.P + tau * core.n, V[0], V[1], V[2])) continue;
        ++crossings;
      }
      if (crossings > 0) break;
      if (core.contains(Q + step)) break;
      auto ex = core.exit();
      if (ex.vertex) throw std::logic_error("core curve meets a cone point");
      if (steps >= budget) throw NotPeriodic("core trace budget exceeded");
      core.cross_edge(ex.id);
    }
    if (crossings == 0) return false;
  }
  return true;
}

}  // namespace veechcomb
