#include "doctest.h"

#include "veechcomb/veech.hpp"

#include <array>
#include <cmath>
#include <random>

using namespace veechcomb;

namespace {

// Floating-point evaluation of an s, t word, used as an independent check.
using M2 = std::array<double, 4>;
M2 mul(const M2& x, const M2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}
M2 float_eval(int g, const Word& w) {
  const double lam = 2 * std::cos(M_PI / (2 * g + 1));
  const M2 s = {0, -1, 1, 0};
  const M2 t = mul(s, {1, lam, 0, 1});
  M2 m = {1, 0, 0, 1};
  for (const auto& l : w) {
    const M2& x = l.gen == 0 ? s : t;
    const long e = ((l.exp % (l.gen == 0 ? 2 : 2 * g + 1)) + (l.gen == 0 ? 2 : 2 * g + 1)) % (l.gen == 0 ? 2 : 2 * g + 1);
    for (long i = 0; i < e; ++i) m = mul(m, x);
  }
  return m;
}

Word random_word(std::mt19937_64& rng, const Presentation& p, int len) {
  Word w;
  std::uniform_int_distribution<int> gen(0, p.rank() - 1);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int i = 0; i < len; ++i) w.push_back({gen(rng), sign(rng) ? 1L : -1L});
  return p.reduce(w);
}

}  // namespace

TEST_CASE("Hecke relations hold exactly for g = 2..10") {
  for (int g = 2; g <= 10; ++g) {
    auto r = hecke_realization(g);
    const FieldElement one(r.field, Rational(1));
    CHECK(r.gamma0 * r.gamma0 == -RealMoebius::identity(one));
    CHECK(r.gamma1.power(r.n()).is_scalar());
    CHECK(projective_order(r.gamma1, 4 * r.n()) == r.n());
    const FieldElement tr = r.parabolic.trace();
    CHECK((tr == FieldElement(r.field, Rational(2)) || tr == FieldElement(r.field, Rational(-2))));
    CHECK(classify(r.parabolic) == MoebiusKind::parabolic);
  }
  CHECK_THROWS_AS(hecke_realization(1), std::invalid_argument);
}

TEST_CASE("kernel of nu is free of rank 2g") {
  for (int g = 2; g <= 4; ++g) {
    auto r = hecke_realization(g);
    auto k = kernel_presentation(r);
    CHECK(k.kernel.index == 2 * r.n());
    CHECK(k.kernel.presentation.rank() == 2 * g);
    CHECK(Rational(k.kernel.presentation.rank()) == 1 - k.kernel.index * k.chi);
    CHECK(nu(r, k.peripheral_parent) == std::pair<long, long>{0, 0});
    CHECK(expand_kernel_word(r, k, k.peripheral) == r.presentation.reduce(k.peripheral_parent));
    auto pm = evaluate_kernel_word(r, k, k.peripheral);
    CHECK(classify(pm) == MoebiusKind::parabolic);
    CHECK(pm.projectively_equal(r.evaluate(k.peripheral_parent)));
    for (const auto& e : k.kernel.expansions) CHECK(nu(r, e) == std::pair<long, long>{0, 0});
  }
}

TEST_CASE("nu is a homomorphism") {
  auto r = hecke_realization(3);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    Word u = random_word(rng, r.presentation, 9), v = random_word(rng, r.presentation, 7);
    auto a = nu(r, u), b = nu(r, v), c = nu(r, r.presentation.multiply(u, v));
    CHECK(c.first == (a.first + b.first) % 2);
    CHECK(c.second == (a.second + b.second) % r.n());
  }
}

TEST_CASE("element classification") {
  auto r = hecke_realization(2);
  auto c = classify_element(r, r.parse("s t s T"));
  CHECK(c.verdict == Verdict::pseudo_anosov);
  CHECK(c.basis == "trace");
  CHECK(classify_element(r, r.parse("s")).order == 2);
  CHECK(classify_element(r, r.parse("t")).order == 5);
  CHECK(classify_element(r, r.parse("t^2")).verdict == Verdict::finite_order);
  auto p = classify_element(r, r.parse("s t"));
  CHECK(p.verdict == Verdict::multitwist_power);
  CHECK(p.peripheral);
  CHECK_FALSE(p.in_kernel);
  auto id = classify_element(r, r.parse("s s"));
  CHECK(id.verdict == Verdict::finite_order);
  CHECK(id.order == 1);
  CHECK(to_string(Verdict::pseudo_anosov) == "pseudoAnosov");

  // Verdicts are class functions.
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    Word w = random_word(rng, r.presentation, 6);
    Word u = random_word(rng, r.presentation, 5);
    Word conj = r.presentation.multiply(r.presentation.multiply(u, w), r.presentation.inverse(u));
    auto a = classify_element(r, w), b = classify_element(r, conj);
    CHECK(a.verdict == b.verdict);
    CHECK(a.peripheral == b.peripheral);
    auto ta = r.evaluate(w).trace(), tb = r.evaluate(conj).trace();
    CHECK(ta * ta == tb * tb);  // traces are defined up to sign
  }
}

TEST_CASE("kernel words: non-peripheral ones are hyperbolic") {
  auto r = hecke_realization(2);
  auto k = kernel_presentation(r);
  const auto& kp = k.kernel.presentation;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(1, 20);
  std::vector<Word> words;
  while (words.size() < 1000) {
    Word w = random_word(rng, kp, len(rng));
    if (!w.empty()) words.push_back(w);
  }
  auto signs = kernel_trace_batch(r, k, words, true);
  int peripheral = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Word parent = expand_kernel_word(r, k, words[i]);
    auto per = conjugate_into_cyclic(r.presentation, parent, r.parse("s t"));
    if (per && per->second != 0) {
      ++peripheral;
      CHECK(signs[i] == 0);
    } else {
      CHECK(signs[i] == 1);
    }
    M2 f = float_eval(2, parent);
    const double tr = std::fabs(f[0] + f[3]);
    if (std::fabs(tr - 2) > 1e-6) CHECK((signs[i] == 1) == (tr > 2));
  }
  CHECK(peripheral < 50);

  // Conjugates of peripheral powers.
  for (int i = 0; i < 50; ++i) {
    Word u = random_word(rng, kp, 6);
    long m = (i % 5) - 2;
    if (m == 0) m = 3;
    Word w = kp.multiply(kp.multiply(u, kp.power(k.peripheral, m)), kp.inverse(u));
    FieldElement t = evaluate_kernel_word(r, k, w).trace();
    CHECK(compare(t * t, FieldElement(r.field, Rational(4))) == 0);
  }
  CHECK(kernel_trace_batch(r, k, words, false) == signs);
}

TEST_CASE("serial and parallel batches agree") {
  auto r = hecke_realization(3);
  std::mt19937_64 rng(3);
  std::vector<Word> words;
  for (int i = 0; i < 60; ++i) words.push_back(random_word(rng, r.presentation, 8));
  auto a = classify_batch(r, words, true), b = classify_batch(r, words, false);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].verdict == b[i].verdict);
    CHECK(a[i].trace == b[i].trace);
  }
}

TEST_CASE("combination construction") {
  for (int g = 2; g <= 5; ++g) {
    auto c = build_combination(g, 2, {1});
    CHECK(c.chi == 2 * (1 - 2 * g));
    REQUIRE(c.genus);
    CHECK(*c.genus == 2 * g);
  }
  auto c3 = build_combination(2, 3, {1, 2});
  CHECK(c3.chi == -9);
  CHECK_FALSE(c3.genus);
  CHECK(c3.surface_claim == "no surface-group claim");
  CHECK_THROWS_AS(build_combination(2, 3, {2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(build_combination(2, 2, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_combination(2, 1, {}), std::invalid_argument);
}

TEST_CASE("classification inside the combination") {
  auto c = build_combination(2, 2, {1});
  auto edge = classify_in_combination(c, "c");
  CHECK(edge.verdict == Verdict::multitwist_power);
  auto one = classify_in_combination(c, "x1_1");
  CHECK(one.basis == "trace");
  CHECK(one.verdict == Verdict::pseudo_anosov);
  auto mixed = classify_in_combination(c, "x1_1 x2_2");
  CHECK(mixed.verdict == Verdict::pseudo_anosov);
  CHECK(mixed.basis == "combination theorem");
  CHECK_FALSE(mixed.assumptions.empty());
  // A conjugate of a single-factor element is seen as such.
  auto conj = classify_in_combination(c, "x1_2 x1_1 X1_2");
  CHECK(conj.basis == "trace");
  CHECK(conj.verdict == one.verdict);
  CHECK(classify_in_combination(c, "x1_2 c X1_2").verdict == Verdict::multitwist_power);
  CHECK_THROWS_AS(classify_in_combination(c, "q7"), MalformedWord);
}
