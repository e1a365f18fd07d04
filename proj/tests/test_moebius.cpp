#include "doctest.h"

#include "veechcomb/kleinian.hpp"
#include "veechcomb/moebius.hpp"

#include <random>

using namespace veechcomb;

namespace {

GaussMoebius gm(long a, long b, long c, long d) {
  return {GaussianRational(a), GaussianRational(b), GaussianRational(c), GaussianRational(d)};
}

RealMoebius rm(const NumberField& f, long a, long b, long c, long d) {
  return {FieldElement(f, Rational(a)), FieldElement(f, Rational(b)), FieldElement(f, Rational(c)),
          FieldElement(f, Rational(d))};
}

const SetCheck* find_check(const KleinianReport& r, const std::string& name) {
  for (const auto& c : r.set_checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("classification by trace") {
  CHECK(classify(gm(1, 1, 0, 1)) == MoebiusKind::parabolic);
  CHECK(classify(gm(0, -1, 1, 0)) == MoebiusKind::elliptic);
  CHECK(classify(gm(2, 1, 1, 1)) == MoebiusKind::hyperbolic_or_loxodromic);
  CHECK(classify(gm(-1, 0, 0, -1)) == MoebiusKind::identity);
  CHECK(classify(gm(-1, 5, 0, -1)) == MoebiusKind::parabolic);
  GaussMoebius lox{GaussianRational(1, 1), GaussianRational(0), GaussianRational(0), GaussianRational(1, 1).conj() / GaussianRational(2)};
  CHECK(classify(lox) == MoebiusKind::hyperbolic_or_loxodromic);
  CHECK_THROWS_AS(classify(gm(1, 2, 2, 4)), std::domain_error);

  auto f = field_2cos_pi_over(5);
  auto phi = FieldElement::generator(f);
  RealMoebius s = rm(f, 0, -1, 1, 0);
  RealMoebius t{FieldElement(f, Rational(1)), phi, FieldElement(f, Rational(0)), FieldElement(f, Rational(1))};
  CHECK(classify(s * t) == MoebiusKind::elliptic);
  CHECK(projective_order(s * t, 20) == 5);
  CHECK(classify(t) == MoebiusKind::parabolic);
  CHECK(classify(s * t * s * t.inverse()) == MoebiusKind::hyperbolic_or_loxodromic);

  FloatMoebius fm{{1, 0}, {1, 0}, {0, 0}, {1, 0}};
  CHECK(classify(fm) == MoebiusKind::parabolic);
  FloatMoebius fe{{std::cos(0.3), 0}, {-std::sin(0.3), 0}, {std::sin(0.3), 0}, {std::cos(0.3), 0}};
  CHECK(classify(fe) == MoebiusKind::elliptic);
}

TEST_CASE("classification is conjugation invariant") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> d(-6, 6);
  std::vector<GaussMoebius> ms = {gm(1, 1, 0, 1), gm(0, -1, 1, 0), gm(2, 1, 1, 1), gm(1, 0, 0, 1), gm(1, 1, -1, 0)};
  int done = 0;
  while (done < 100) {
    GaussMoebius p{GaussianRational(d(rng), d(rng)), GaussianRational(d(rng), d(rng)),
                   GaussianRational(d(rng), d(rng)), GaussianRational(d(rng), d(rng))};
    if (p.det().is_zero()) continue;
    ++done;
    for (const auto& m : ms) CHECK(classify(p * m * p.inverse()) == classify(m));
  }
}

TEST_CASE("shears stay parabolic") {
  GaussMoebius h{GaussianRational(1), GaussianRational(Rational(1, 2), 3), GaussianRational(0), GaussianRational(1)};
  for (long k = -7; k <= 7; ++k) {
    if (k == 0) continue;
    CHECK(classify(h.power(k)) == MoebiusKind::parabolic);
  }
  CHECK(h.power(3).b == GaussianRational(Rational(3, 2), 9));
}

TEST_CASE("region membership") {
  auto theta = standard_strip();
  auto H = standard_horoballs();
  CHECK(theta.contains(GaussianRational(0)));
  CHECK(theta.contains(GaussianRational(3, 1)));
  CHECK(H.contains(GaussianRational(0, 2)));
  CHECK_FALSE(H.contains(GaussianRational(0, 1)));
  CHECK(H.contains(GaussianRational(0, Rational(-11, 10))));
  Region half{RegionKind::halfplane, 0, 0};
  CHECK(half.contains(GaussianRational(0, Rational(1, 100))));
  CHECK_FALSE(half.contains(GaussianRational(5)));
}

TEST_CASE("minimal shear power") {
  CHECK(min_shear_power(GaussianRational(0, 2)) == 2);
  CHECK(min_shear_power(GaussianRational(Rational(1, 2), 3)) == 1);
  CHECK(min_shear_power(GaussianRational(0, Rational(-1, 3))) == 7);
  CHECK_THROWS_AS(min_shear_power(GaussianRational(5)), std::invalid_argument);
  CHECK(min_shear_power(std::complex<double>(0, 2)) == 2);
  // Predicate re-check: K mu shifts the strip into H, K - 1 does not.
  for (long q = 1; q <= 12; ++q) {
    GaussianRational mu(0, Rational(q, 5));
    long K = min_shear_power(mu);
    Rational c = K * mu.im;
    CHECK((c - 1 > 1));
    Rational c1 = (K - 1) * mu.im;
    CHECK_FALSE((c1 - 1 > 1));
  }
}

TEST_CASE("Kleinian model passes with k = K") {
  KleinianOptions opt;
  opt.depth = 4;
  auto r = kleinian_model(opt);
  CHECK(r.min_power == 2);
  CHECK(r.syllables_g1 == 10);
  for (const auto& c : r.set_checks) {
    INFO(c.name << ": " << c.witness);
    CHECK(c.pass);
  }
  for (const auto& c : r.pingpong.conditions) {
    INFO(c.name << ": " << c.witness);
    CHECK(c.pass);
  }
  CHECK(r.pingpong.replay.pass);
  CHECK(r.pingpong.replay.words == 2 * (10 + 100 + 1000 + 10000));
  CHECK(r.pass());
  CHECK(r.arithmetic == "int64");
}

TEST_CASE("Kleinian model with k = 1 fails the containment") {
  KleinianOptions opt;
  opt.k = 1;
  opt.depth = 2;
  auto r = kleinian_model(opt);
  CHECK_FALSE(r.precondition_ok);
  auto c = find_check(r, "h^k(Theta) subset H");
  REQUIRE(c);
  CHECK_FALSE(c->pass);
  CHECK(c->witness == "z = i");
  CHECK_FALSE(r.pass());
  // The regions touch along Im z = 1.
  CHECK_FALSE(r.pingpong.conditions[1].pass);
}

TEST_CASE("depth 0 runs only the set checks") {
  KleinianOptions opt;
  opt.depth = 0;
  auto r = kleinian_model(opt);
  CHECK(r.pingpong.replay.words == 0);
  CHECK(r.pass());
  CHECK(r.set_checks.size() == 4);
}

TEST_CASE("serial and parallel replays agree") {
  KleinianOptions opt;
  opt.depth = 3;
  opt.samples = 20;
  auto a = kleinian_model(opt);
  opt.parallel = false;
  auto b = kleinian_model(opt);
  CHECK(a.pingpong.replay.words == b.pingpong.replay.words);
  CHECK(a.pass() == b.pass());
}

TEST_CASE("large shears fall back to GMP integers") {
  KleinianOptions opt;
  opt.mu = GaussianRational(Rational(1, 3), Rational(100000001, 7));
  opt.k = 1;
  opt.depth = 3;
  opt.samples = 10;
  auto r = kleinian_model(opt);
  CHECK(r.arithmetic == "mpz");
  CHECK(r.pass());
}
