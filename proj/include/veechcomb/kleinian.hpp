#pragma once

#include "veechcomb/moebius.hpp"
#include "veechcomb/pingpong.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace veechcomb {

/// Integer matrix [[a, b], [c, d]] of a Fuchsian factor.
using IntMatrix = std::array<long, 4>;

struct NamedGenerator {
  std::string name;
  IntMatrix m;
};

struct KleinianOptions {
  GaussianRational mu{0, 2};
  long k = 2;
  int samples = 200;
  int depth = 4;
  std::uint64_t seed = 0;
  /// Syllables are the distinct non-parabolic-subgroup elements given by
  /// reduced generator words of length <= syllable_length.
  int syllable_length = 2;
  bool parallel = true;
  /// Both factors default to the level-2 congruence group <T, B>.
  std::vector<NamedGenerator> g1 = {{"T", {1, 1, 0, 1}}, {"B", {1, 0, 2, 1}}};
  std::vector<NamedGenerator> g2 = {{"T", {1, 1, 0, 1}}, {"B", {1, 0, 2, 1}}};
  std::vector<NamedGenerator> edge = {{"T", {1, 1, 0, 1}}};
};

struct SetCheck {
  std::string name;
  bool pass = true;
  std::string witness;
  std::string evidence = "exact";
  long checks = 0;
};

struct KleinianReport {
  long min_power = 0;
  bool precondition_ok = true;
  std::vector<SetCheck> set_checks;
  PingPongReport pingpong;
  std::size_t syllables_g1 = 0, syllables_g2 = 0;
  std::string arithmetic;  // "int64" or "mpz"
  std::vector<std::string> assumptions;

  bool pass() const;
};

KleinianReport kleinian_model(const KleinianOptions& opt);

}  // namespace veechcomb
