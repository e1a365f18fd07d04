#include "doctest.h"

#include "veechcomb/flatgeom.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

using namespace veechcomb;

namespace {

FieldElement q(long p, long r = 1) { return FieldElement(NumberField::rationals(), Rational(p, r)); }
Vec2 qv(long x, long y) { return {q(x), q(y)}; }

HalfTranslationSurface square_torus() {
  std::vector<Vec2> sq{qv(0, 0), qv(1, 0), qv(1, 1), qv(0, 1)};
  return HalfTranslationSurface(NumberField::rationals(), {sq}, {{0, 2, 1, qv(0, -1)}, {1, 3, 1, qv(1, 0)}}, {{0, 0}});
}

// [0,2]x[0,1] folded into a sphere with four points of angle pi.
HalfTranslationSurface pillowcase() {
  std::vector<Vec2> hex{qv(0, 0), qv(1, 0), qv(2, 0), qv(2, 1), qv(1, 1), qv(0, 1)};
  return HalfTranslationSurface(NumberField::rationals(), {hex},
                                {{0, 1, -1, qv(2, 0)}, {3, 4, -1, qv(2, 2)}, {2, 5, 1, qv(2, 0)}},
                                {{0, 0}, {0, 1}, {0, 3}, {0, 4}});
}

// Primitive integer vectors (p, q) up to sign with p^2 + q^2 <= L^2.
long primitive_count(long L) {
  long n = 0;
  for (long x = -L; x <= L; ++x)
    for (long y = -L; y <= L; ++y)
      if ((x || y) && x * x + y * y <= L * L && std::gcd(std::labs(x), std::labs(y)) == 1) ++n;
  return n / 2;
}

double regular_polygon_area(int n) { return n / (4 * std::tan(M_PI / n)); }

std::vector<SaddleConnection> canonical_set(const HalfTranslationSurface& s, std::vector<SaddleConnection> v) {
  for (auto& x : v) x = canonical(s, x);
  std::sort(v.begin(), v.end(), holonomy_less);
  return v;
}

bool same_set(const std::vector<SaddleConnection>& a, const std::vector<SaddleConnection>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool found = false;
    for (const auto& y : b)
      if (x.same_as(y)) found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("double polygon invariants") {
  for (int g = 2; g <= 5; ++g) {
    auto t0 = std::chrono::steady_clock::now();
    auto s = build_double_polygon(g);
    auto inv = surface_invariants(s);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 1.0);
    CHECK(inv.genus == g);
    CHECK(inv.euler_char == 2 - 2 * g);
    REQUIRE(inv.cone_points.size() == 1);
    CHECK(inv.cone_points[0].second == 4 * g - 2);
    CHECK(inv.gauss_bonnet);
    CHECK(s.area().approx() == doctest::Approx(2 * regular_polygon_area(2 * g + 1)));
  }
}

TEST_CASE("surface validation") {
  auto s = square_torus();
  CHECK(s.genus() == 1);
  CHECK(s.cone_points()[0].multiple == 2);
  CHECK(s.area() == q(1));

  std::vector<Vec2> sq{qv(0, 0), qv(1, 0), qv(1, 1), qv(0, 1)};
  auto F = NumberField::rationals();
  try {
    HalfTranslationSurface(F, {sq}, {{0, 2, 1, qv(0, -1)}, {1, 3, 1, qv(1, 0)}});
    FAIL("unmarked angle 2 pi accepted");
  } catch (const SurfaceError& e) {
    CHECK(std::string(e.what()).find("cone angle") != std::string::npos);
  }
  try {
    HalfTranslationSurface(F, {sq}, {{0, 2, 1, qv(0, -2)}, {1, 3, 1, qv(1, 0)}}, {{0, 0}});
    FAIL("bad gluing accepted");
  } catch (const SurfaceError& e) {
    CHECK(std::string(e.what()).find("edges 0 and 2") != std::string::npos);
  }
  std::vector<Vec2> cw(sq.rbegin(), sq.rend());
  CHECK_THROWS_AS(HalfTranslationSurface(F, {cw}, {{0, 2, 1, qv(0, 1)}, {1, 3, 1, qv(1, 0)}}, {{0, 0}}),
                  SurfaceError);
  CHECK_THROWS_AS(HalfTranslationSurface(F, {sq}, {{0, 2, 1, qv(0, -1)}}, {{0, 0}}), SurfaceError);

  auto p = pillowcase();
  CHECK(p.genus() == 0);
  CHECK(p.cone_points().size() == 4);
  for (const auto& c : p.cone_points()) CHECK(c.multiple == 1);
}

TEST_CASE("saddle connections on the torus and pillowcase match lattice counts") {
  auto t = square_torus();
  auto p = pillowcase();
  for (long L : {1, 2, 3, 5, 8}) {
    CHECK(static_cast<long>(enumerate_saddle_connections(t, q(L)).size()) == primitive_count(L));
    CHECK(static_cast<long>(enumerate_saddle_connections(p, q(L)).size()) == 2 * primitive_count(L));
  }
  // No connection is reported twice and every one retraces.
  for (const auto& sc : enumerate_saddle_connections(p, q(6))) {
    auto r = trace_from_corner(p, sc.start_corner, sc.holonomy);
    CHECK(r.holonomy == sc.holonomy);
    CHECK(r.end_corner == sc.end_corner);
    auto back = reverse(p, sc);
    CHECK(back.same_as(sc));
    CHECK(trace_from_corner(p, back.start_corner, back.holonomy).end_corner == sc.start_corner);
  }
}

TEST_CASE("saddle connections on the double pentagon") {
  auto s = build_double_polygon(2);
  auto rho = rotation_auto(s, 2);
  auto all = enumerate_saddle_connections(s, s.num(4));
  // Sides have length 1, the short diagonals length 2cos(pi/5).
  const double golden = 2 * std::cos(M_PI / 5);
  long ones = 0, shorts = 0;
  for (const auto& sc : all) {
    double len = std::sqrt(norm2(sc.holonomy).approx());
    if (std::fabs(len - 1) < 1e-9) ++ones;
    if (len < golden + 1e-9) ++shorts;
  }
  CHECK(ones == 5);
  CHECK(shorts == 15);

  // Serial and parallel runs agree.
  auto serial = enumerate_saddle_connections(s, s.num(4), std::nullopt, false);
  REQUIRE(serial.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(serial[i].same_as(all[i]));

  // The rotation permutes them.
  CHECK(same_set(apply_affine(s, rho, all), canonical_set(s, all)));

  // Five rotated copies of a 2pi/5 sector cover every slope twice.
  Direction h(s.vec(1, 0));
  Direction r(rho.derivative * s.vec(1, 0));
  auto sector = enumerate_saddle_connections(s, s.num(4), Sector{h, r});
  CHECK(5 * sector.size() == 2 * all.size());
}

TEST_CASE("rotation automorphism") {
  auto s = build_double_polygon(3);
  auto rho = rotation_auto(s, 3);
  auto all = enumerate_saddle_connections(s, s.num(2));
  std::vector<SaddleConnection> cur = all;
  for (int i = 0; i < 7; ++i) cur = apply_affine(s, rho, cur);
  CHECK(same_set(cur, all));
  for (std::size_t i = 0; i < all.size(); ++i) {
    // sorted order is preserved up to the set, compare holonomy lengths
    CHECK(norm2(cur[i].holonomy) == norm2(canonical_set(s, all)[i].holonomy));
  }
  AffineAuto bad = rho;
  bad.shift[0] = s.vec(2, 0);
  CHECK_THROWS_AS(validate_affine(s, bad), std::invalid_argument);
  CHECK(validate_affine(s, identity_auto(s)).size() == static_cast<std::size_t>(s.edge_count()));
}

TEST_CASE("horizontal cylinders of the double pentagon") {
  auto s = build_double_polygon(2);
  auto dec = cylinder_decomposition(s, Direction(s.vec(1, 0)));
  REQUIRE(dec.cylinders.size() == 2);
  CHECK(dec.spine.size() == 3);
  CHECK(dec.components.size() == 1);
  FieldElement total(s.field());
  for (const auto& c : dec.cylinders) total += c.area;
  CHECK(total == s.area());
  FieldElement ratio = dec.modulus(0) / dec.modulus(1);
  for (std::size_t i = 1; i < ratio.coords().size(); ++i) CHECK(ratio.coords()[i] == Rational(0));

  // Float oracle: one cylinder is the two apex triangles above the long
  // diagonals, the other the two trapezoids below them.
  const double c1 = std::cos(2 * M_PI / 5), diag = 1 + 2 * c1;
  const double tri = diag * std::sin(4 * M_PI / 5) / 2, trap = (1 + diag) / 2 * std::sin(2 * M_PI / 5);
  double lo = std::min(dec.cylinders[0].area.approx(), dec.cylinders[1].area.approx());
  double hi = std::max(dec.cylinders[0].area.approx(), dec.cylinders[1].area.approx());
  CHECK(lo == doctest::Approx(2 * tri));
  CHECK(hi == doctest::Approx(2 * trap));

  auto bad = has_bad_singularity(s, dec.spine);
  CHECK_FALSE(bad.bad);

  auto rho = rotation_auto(s, 2);
  auto img = apply_affine(s, rho, dec);
  auto direct = cylinder_decomposition(s, img.direction);
  CHECK(same_set(img.spine, direct.spine));
  REQUIRE(direct.cylinders.size() == 2);
  FieldElement a0 = img.cylinders[0].area, a1 = img.cylinders[1].area;
  CHECK(((a0 == direct.cylinders[0].area && a1 == direct.cylinders[1].area) ||
         (a0 == direct.cylinders[1].area && a1 == direct.cylinders[0].area)));

  auto joint = dec.spine;
  joint.insert(joint.end(), img.spine.begin(), img.spine.end());
  auto rep = has_bad_singularity(s, joint);
  CHECK(rep.bad);
  CHECK(rep.point == 0);
  REQUIRE(rep.gaps.size() == 12);
  double sum = 0;
  for (double g : rep.gaps) {
    CHECK(g < M_PI);
    sum += g;
  }
  CHECK(sum == doctest::Approx(6 * M_PI));

  CHECK(cores_intersect(s, dec, img));
  CHECK(cores_intersect(s, img, dec));
  CHECK_FALSE(cores_intersect(s, dec, dec));
  CHECK(contains_spine_component(joint, dec, 0));
  CHECK_FALSE(contains_spine_component(dec.spine, img, 0));
  CHECK_THROWS_AS(contains_spine_component(joint, dec, 3), std::out_of_range);
}

TEST_CASE("torus cylinders in rational directions") {
  auto t = square_torus();
  for (auto [x, y] : std::vector<std::pair<long, long>>{{1, 0}, {0, 1}, {1, 1}, {2, 3}, {-3, 5}}) {
    auto dec = cylinder_decomposition(t, Direction(qv(x, y)));
    REQUIRE(dec.cylinders.size() == 1);
    // One cylinder of circumference |(x,y)| and width 1/|(x,y)|.
    CHECK(dec.cylinders[0].area == q(1));
    CHECK(dec.cylinders[0].circumference == q(1));
  }
}

TEST_CASE("non-periodic direction is reported") {
  auto s = build_double_polygon(2);
  Vec2 d{s.num(7), FieldElement::generator(s.field()) + s.num(1)};
  CHECK_THROWS_AS(cylinder_decomposition(s, Direction(d), 50), NotPeriodic);
}

TEST_CASE("flat geodesic test and its symmetry") {
  auto s = build_double_polygon(2);
  auto rho = rotation_auto(s, 2);
  auto all = enumerate_saddle_connections(s, s.num(3));
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::uniform_int_distribution<int> len(1, 4), coin(0, 1);
  int yes = 0;
  for (int i = 0; i < 100; ++i) {
    GeodesicCycle c;
    int n = len(rng);
    for (int j = 0; j < n; ++j) {
      auto sc = all[pick(rng)];
      c.path.push_back(coin(rng) ? reverse(s, sc) : sc);
    }
    auto a = is_flat_geodesic(s, c);
    auto b = is_flat_geodesic(s, apply_affine(s, rho, c));
    CHECK(a.geodesic == b.geodesic);
    if (a.geodesic) ++yes;
    if (!a.geodesic) {
      REQUIRE(a.witness);
      CHECK(a.witness->left + a.witness->right == doctest::Approx(6 * M_PI));
      CHECK(std::min(a.witness->left, a.witness->right) < M_PI + 1e-9);
    }
  }
  CHECK(yes > 0);
  CHECK(yes < 100);

  // A connection followed by itself backwards turns by zero.
  GeodesicCycle back{{all[0], reverse(s, all[0])}, std::nullopt};
  CHECK_FALSE(is_flat_geodesic(s, back).geodesic);
  GeodesicCycle core{{}, 0};
  CHECK(is_flat_geodesic(s, core).geodesic);

  auto p = pillowcase();
  auto ps = enumerate_saddle_connections(p, q(1));
  GeodesicCycle open{{ps[0]}, std::nullopt};
  if (ps[0].start != ps[0].end) CHECK_THROWS_AS(is_flat_geodesic(p, open), std::invalid_argument);
}

TEST_CASE("marked points only need one side") {
  auto t = square_torus();
  auto all = enumerate_saddle_connections(t, q(1));
  REQUIRE(all.size() == 2);
  // Horizontal then vertical: angle pi/2 on one side, 3pi/2 on the other.
  GeodesicCycle c{{all[0], all[1]}, std::nullopt};
  CHECK(is_flat_geodesic(t, c).geodesic);
  GeodesicCycle back{{all[0], reverse(t, all[0])}, std::nullopt};
  CHECK(is_flat_geodesic(t, back).geodesic);
}

namespace {

// Unfolding oracle in floating point: follows sequences of edge crossings
// from each corner, keeping the interval of angles (measured from the
// corner's first side) of rays that cross every edge so far, and accepts a
// far vertex when the straight segment to it properly crosses each edge of
// the sequence. Counts oriented connections.
struct P2 {
  double x, y;
};
P2 fp(const Vec2& v) { return {v.x.approx(), v.y.approx()}; }
double fcross(P2 a, P2 b) { return a.x * b.y - a.y * b.x; }
P2 fsub(P2 a, P2 b) { return {a.x - b.x, a.y - b.y}; }

bool proper_cross(P2 o, P2 c, P2 a, P2 b) {
  const double eps = 1e-9;
  double d1 = fcross(fsub(c, o), fsub(a, o)), d2 = fcross(fsub(c, o), fsub(b, o));
  double d3 = fcross(fsub(b, a), fsub(o, a)), d4 = fcross(fsub(b, a), fsub(c, a));
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

double seg_dist(P2 o, P2 a, P2 b) {
  P2 e = fsub(b, a);
  double t = ((o.x - a.x) * e.x + (o.y - a.y) * e.y) / (e.x * e.x + e.y * e.y);
  t = std::clamp(t, 0.0, 1.0);
  P2 q{a.x + t * e.x - o.x, a.y + t * e.y - o.y};
  return std::sqrt(q.x * q.x + q.y * q.y);
}

long unfolding_count(const HalfTranslationSurface& s, double L) {
  long count = 0;
  const int corners = 3 * static_cast<int>(s.triangles().size());
  for (int c = 0; c < corners; ++c) {
    const auto& T0 = s.triangles()[c / 3];
    const int k = c % 3;
    P2 O = fp(T0.v[k]);
    P2 u = fp(s.corner_first(c));
    if (std::hypot(u.x, u.y) <= L + 1e-9) ++count;
    struct Seg {
      P2 a, b;
    };
    // developed frame: z -> sign z + (sx, sy)
    struct Node {
      int tri, entry, sign;
      P2 shift;
      std::vector<Seg> crossed;
      double lo, hi;
    };
    auto angle = [&](P2 z) {
      P2 d = fsub(z, O);
      return std::atan2(fcross(u, d), u.x * d.x + u.y * d.y);
    };
    auto dev = [](const Node& n, P2 z) { return P2{n.sign * z.x + n.shift.x, n.sign * z.y + n.shift.y}; };
    std::vector<Node> stack;
    auto push = [&](const Node& from, int h, Seg seg) {
      if (seg_dist(O, seg.a, seg.b) > L + 1e-9) return;
      double a1 = angle(seg.a), a2 = angle(seg.b);
      double lo = std::max(from.lo, std::min(a1, a2)), hi = std::min(from.hi, std::max(a1, a2));
      if (lo >= hi) return;
      P2 w = fp(s.partner_shift(h));
      int sg = s.partner_sign(h);
      Node n{s.partner(h) / 3, s.partner(h), from.sign * sg, {from.sign * w.x + from.shift.x, from.sign * w.y + from.shift.y},
             from.crossed, lo, hi};
      n.crossed.push_back(seg);
      stack.push_back(std::move(n));
    };
    Node root{c / 3, -1, 1, {0, 0}, {}, -1.0, 4.0};
    push(root, 3 * (c / 3) + (k + 1) % 3, {fp(T0.v[(k + 1) % 3]), fp(T0.v[(k + 2) % 3])});
    while (!stack.empty()) {
      Node n = std::move(stack.back());
      stack.pop_back();
      const auto& T = s.triangles()[n.tri];
      const int j = n.entry % 3;
      P2 C = dev(n, fp(T.v[(j + 2) % 3])), R = dev(n, fp(T.v[(j + 1) % 3])), Lf = dev(n, fp(T.v[j]));
      bool visible = true;
      for (const auto& sg : n.crossed)
        if (!proper_cross(O, C, sg.a, sg.b)) visible = false;
      if (visible && std::hypot(C.x - O.x, C.y - O.y) <= L + 1e-9) ++count;
      push(n, 3 * n.tri + (j + 1) % 3, {R, C});
      push(n, 3 * n.tri + (j + 2) % 3, {C, Lf});
    }
  }
  return count;
}

}  // namespace

TEST_CASE("enumeration matches the unfolding oracle") {
  auto s = build_double_polygon(2);
  CHECK(2 * static_cast<long>(enumerate_saddle_connections(s, s.num(3)).size()) == unfolding_count(s, 3.0));
  auto s3 = build_double_polygon(3);
  CHECK(2 * static_cast<long>(enumerate_saddle_connections(s3, s3.num(2)).size()) == unfolding_count(s3, 2.0));
  auto p = pillowcase();
  CHECK(2 * static_cast<long>(enumerate_saddle_connections(p, q(4)).size()) == unfolding_count(p, 4.0));
}

TEST_CASE("split sectors partition the enumeration") {
  auto s = build_double_polygon(2);
  Direction h(s.vec(1, 0)), v(s.vec(0, 1));
  auto all = enumerate_saddle_connections(s, s.num(3));
  auto a = enumerate_saddle_connections(s, s.num(3), Sector{h, v});
  auto b = enumerate_saddle_connections(s, s.num(3), Sector{v, h});
  auto joined = a;
  joined.insert(joined.end(), b.begin(), b.end());
  CHECK(same_set(joined, all));
  CHECK(enumerate_saddle_connections(s, s.num(3), Sector{h, h}).size() == all.size());
  CHECK_THROWS_AS(enumerate_saddle_connections(s, s.num(0)), std::invalid_argument);
}

TEST_CASE("geodesic test examples") {
  auto s = build_double_polygon(2);
  // Two consecutive sides of the first pentagon turn by its interior angle 3pi/5.
  auto e0 = trace_from_corner(s, s.locate_corner(0, 0, s.vec(1, 0)), s.vec(1, 0));
  const Vec2 side1 = s.polygons()[0][2] - s.polygons()[0][1];
  auto e1 = trace_from_corner(s, s.locate_corner(0, 1, side1), side1);
  GeodesicCycle turn{{e0, e1}, std::nullopt};
  auto rep = is_flat_geodesic(s, turn);
  CHECK_FALSE(rep.geodesic);
  REQUIRE(rep.witness);
  CHECK(std::min(rep.witness->left, rep.witness->right) == doctest::Approx(3 * M_PI / 5));

  // Boundary cycles of the horizontal cylinders are flat geodesics.
  auto dec = cylinder_decomposition(s, Direction(s.vec(1, 0)));
  for (const auto& cyl : dec.cylinders)
    for (const auto* cyc : {&cyl.bottom, &cyl.top}) {
      GeodesicCycle c;
      for (const auto& oc : *cyc) c.path.push_back(oc.reversed ? reverse(s, dec.spine[oc.index]) : dec.spine[oc.index]);
      CHECK(is_flat_geodesic(s, c).geodesic);
    }
  CHECK_FALSE(has_bad_singularity(s, {}).bad);
}

TEST_CASE("spine membership and affine images") {
  auto s = build_double_polygon(2);
  auto dec = cylinder_decomposition(s, Direction(s.vec(1, 0)));
  auto rho = rotation_auto(s, 2);
  CHECK(contains_spine_component(dec.spine, dec, 0));
  auto partial = dec.spine;
  partial.pop_back();
  CHECK_FALSE(contains_spine_component(partial, dec, 0));
  auto rotated = apply_affine(s, rho, dec.spine);
  for (std::size_t j = 0; j < dec.components.size(); ++j)
    CHECK_FALSE(contains_spine_component(rotated, dec, static_cast<int>(j)));

  auto id = identity_auto(s);
  for (const auto& sc : dec.spine) {
    auto img = apply_affine(s, id, sc);
    CHECK(img.holonomy == sc.holonomy);
    CHECK(img.start_corner == sc.start_corner);
    auto r = apply_affine(s, rho, sc);
    CHECK(r.holonomy == rho.derivative * sc.holonomy);
  }
  auto img = apply_affine(s, rho, dec);
  CHECK(img.cylinders.size() == dec.cylinders.size());

  auto t = square_torus();
  auto h = cylinder_decomposition(t, Direction(qv(1, 0)));
  CHECK(h.modulus(0) == q(1));
  auto d = cylinder_decomposition(t, Direction(qv(1, 2)));
  CHECK(cores_intersect(t, h, d));
  CHECK(cores_intersect(t, d, h));
}
