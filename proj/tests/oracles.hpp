#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include "veechcomb/groupcore.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Mat2 = std::array<long, 4>;

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

// Z/4 *_{Z/2} Z/6 with a^2 = c = b^3 is SL(2,Z) via a -> S, b -> ST.
inline veechcomb::Amalgam z4_z2_z6() {
  using namespace veechcomb;
  AmalgamSpec spec;
  spec.factors = {Presentation::cyclic("a", 4), Presentation::cyclic("b", 6)};
  spec.edge = Presentation::cyclic("c", 2);
  spec.embeddings = {{{{0, 2}}}, {{{0, 3}}}};
  return Amalgam(spec);
}

struct NormalFormAgreement {
  long words = 0;
  long classes = 0;
  long disagreements = 0;
  std::string first_disagreement;
};

// Compares equality by normal form against equality of SL(2,Z) images on
// every word of length <= max_len over {a, A, b, B, c}.
inline NormalFormAgreement check_normal_forms_against_sl2z(const veechcomb::Amalgam& am, int max_len) {
  using namespace veechcomb;
  const Mat2 S{0, -1, 1, 0}, Si{0, 1, -1, 0}, U{0, -1, 1, 1}, Ui{1, 1, -1, 0}, C{-1, 0, 0, -1};
  struct Gen {
    AmalgamLetter letter;
    Mat2 m;
  };
  const std::vector<Gen> gens = {{{0, {0, 1}}, S}, {{0, {0, -1}}, Si}, {{1, {0, 1}}, U}, {{1, {0, -1}}, Ui},
                                 {{-1, {0, 1}}, C}};
  NormalFormAgreement out;
  std::map<std::string, Mat2> by_nf;
  std::map<Mat2, std::string> by_mat;
  AmalgamWord w;
  auto visit = [&](const Mat2& m) {
    ++out.words;
    std::string key = am.format(am.normal_form(w));
    auto [it1, new1] = by_nf.emplace(key, m);
    auto [it2, new2] = by_mat.emplace(m, key);
    if (new1) ++out.classes;
    if (it1->second != m || it2->second != key) {
      if (out.disagreements++ == 0) out.first_disagreement = am.format(w) + " -> " + key;
    }
  };
  auto rec = [&](auto&& self, const Mat2& m, int depth) -> void {
    visit(m);
    if (depth == max_len) return;
    for (const auto& g : gens) {
      w.push_back(g.letter);
      self(self, mul(m, g.m), depth + 1);
      w.pop_back();
    }
  };
  rec(rec, Mat2{1, 0, 0, 1}, 0);
  return out;
}

}  // namespace oracle
