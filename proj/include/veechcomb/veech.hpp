#pragma once

#include "veechcomb/groupcore.hpp"
#include "veechcomb/moebius.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace veechcomb {

/// The (2, 2g+1, infinity) triangle group realized as the Hecke group
/// <gamma0, gamma1> with gamma1 = gamma0 [[1, lambda], [0, 1]],
/// lambda = 2cos(pi/(2g+1)). Words use "s" = gamma0, "t" = gamma1.
struct VeechRealization {
  int g = 0;
  NumberField field;
  FieldElement lambda;
  RealMoebius gamma0, gamma1, parabolic;
  Presentation presentation;  // Z/2 * Z/(2g+1)
  std::vector<RealMoebius> gamma1_powers;  // gamma1^0 .. gamma1^(2g)

  long n() const { return 2 * g + 1; }
  Word parse(std::string_view text) const { return presentation.parse(text); }
  RealMoebius evaluate(const Word& w) const;
};

VeechRealization hecke_realization(int g);

/// Exponent sums modulo (2, 2g+1).
std::pair<long, long> nu(const VeechRealization& r, const Word& w);

struct VeechKernel {
  KernelPresentation kernel;          // free, rank 2g
  Word peripheral_parent;             // (s t)^(2(2g+1))
  Word peripheral;                    // the same element in kernel generators
  std::vector<RealMoebius> generator_matrices;  // images of x1.., x1^-1.. interleaved
  Rational chi;                       // Euler characteristic of the parent group
};

VeechKernel kernel_presentation(const VeechRealization& r);

/// Kernel-generator word expanded into s, t.
Word expand_kernel_word(const VeechRealization& r, const VeechKernel& k, const Word& w);
/// Matrix of a word in the kernel generators.
RealMoebius evaluate_kernel_word(const VeechRealization& r, const VeechKernel& k, const Word& w);

enum class Verdict { finite_order, multitwist_power, pseudo_anosov };
std::string to_string(Verdict v);

struct ClassificationCertificate {
  std::string word;
  std::vector<std::string> matrix;  // a, b, c, d
  std::string trace;
  double trace_approx = 0;
  MoebiusKind kind = MoebiusKind::identity;
  Verdict verdict = Verdict::finite_order;
  long order = 0;  // projective order for finite-order verdicts
  std::string basis;  // "trace" or "combination theorem"
  std::pair<long, long> nu{0, 0};
  bool in_kernel = false;
  bool peripheral = false;
  std::string normal_form;  // combination classifications only
  std::string conjugator;
  std::vector<std::string> citations;
  std::vector<std::string> assumptions;
};

ClassificationCertificate classify_element(const VeechRealization& r, const Word& w);

/// Batch classification; `parallel` selects the OpenMP kernel, otherwise
/// the serial reference loop. Output order follows input order.
std::vector<ClassificationCertificate> classify_batch(const VeechRealization& r, const std::vector<Word>& words,
                                                      bool parallel);

/// Absolute traces of kernel words, the hot loop of the density check.
/// Returns |trace| > 2 per word.
std::vector<int> kernel_trace_batch(const VeechRealization& r, const VeechKernel& k, const std::vector<Word>& words,
                                    bool parallel);

// ---------------------------------------------------------------------------
// Combination driver

struct Combination {
  int g = 0;
  int factors = 0;
  AmalgamSpec spec;
  Rational chi;
  std::optional<int> genus;  // closed-surface genus, two-factor case only
  std::string surface_claim;
  VeechRealization realization;
  VeechKernel kernel;
};

/// powers = (k_2, ..., k_P), strictly increasing and positive.
Combination build_combination(int g, int P, const std::vector<long>& powers);

ClassificationCertificate classify_in_combination(const Combination& comb, std::string_view word);

}  // namespace veechcomb
