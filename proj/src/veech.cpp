#include "veechcomb/veech.hpp"

#include <exception>

namespace veechcomb {

namespace {

const char* kTraceTrichotomy =
    "trace trichotomy: finite order iff the derivative is elliptic or trivial, power of a positive multitwist iff "
    "parabolic, pseudo-Anosov iff hyperbolic";
const char* kCombination =
    "combination theorem: elements of the amalgam not conjugate into an elliptic or parabolic subgroup of a factor "
    "are pseudo-Anosov";

std::vector<std::string> realization_assumptions() {
  return {"derivative image modelled by the conjugate Hecke realization; only traces and orders are used",
          "finite kernel of the derivative map treated as trivial"};
}

std::string fe_string(const FieldElement& x) { return x.to_string(); }

}  // namespace

RealMoebius VeechRealization::evaluate(const Word& w) const {
  RealMoebius m = RealMoebius::identity(lambda);
  for (const auto& l : presentation.reduce(w)) {
    if (l.gen == 0) {
      m = m * gamma0;
    } else {
      m = m * gamma1_powers.at(l.exp);
    }
  }
  return m;
}

VeechRealization hecke_realization(int g) {
  if (g < 2) throw std::invalid_argument("genus must be at least 2");
  const long n = 2L * g + 1;
  VeechRealization r;
  r.g = g;
  r.field = field_2cos_pi_over(static_cast<int>(n));
  r.lambda = FieldElement::generator(r.field);
  FieldElement zero(r.field), one(r.field, Rational(1));
  r.gamma0 = {zero, -one, one, zero};
  RealMoebius T{one, r.lambda, zero, one};
  r.gamma1 = r.gamma0 * T;
  r.parabolic = r.gamma0 * r.gamma1;
  r.presentation = Presentation::free_product_of_cyclics({"s", "t"}, {2, n});
  r.gamma1_powers.push_back(RealMoebius::identity(one));
  for (long k = 1; k < n; ++k) r.gamma1_powers.push_back(r.gamma1_powers.back() * r.gamma1);

  // Relations, checked exactly.
  RealMoebius minus_id = -RealMoebius::identity(one);
  if (!(r.gamma0 * r.gamma0 == minus_id)) throw std::logic_error("gamma0^2 != -I");
  if (projective_order(r.gamma1, n) != n) throw std::logic_error("gamma1 has the wrong projective order");
  FieldElement tr = r.parabolic.trace();
  if (!(tr == FieldElement(r.field, Rational(2)) || tr == FieldElement(r.field, Rational(-2))))
    throw std::logic_error("gamma0 gamma1 is not parabolic");
  return r;
}

std::pair<long, long> nu(const VeechRealization& r, const Word& w) {
  long a = 0, b = 0;
  for (const auto& l : w) {
    if (l.gen == 0) {
      a += l.exp;
    } else if (l.gen == 1) {
      b += l.exp;
    } else {
      throw MalformedWord("letter outside {s, t}");
    }
  }
  auto m = [](long x, long k) { return ((x % k) + k) % k; };
  return {m(a, 2), m(b, r.n())};
}

VeechKernel kernel_presentation(const VeechRealization& r) {
  VeechKernel k;
  k.kernel = reidemeister_schreier(r.presentation, {2, r.n()}, {{1, 0}, {0, 1}});
  k.chi = *r.presentation.euler_characteristic();
  const auto& kp = k.kernel.presentation;
  if (kp.kind() != PresentationKind::free || kp.rank() != 2 * r.g)
    throw std::logic_error("kernel is not free of rank 2g");
  if (Rational(kp.rank()) != 1 - k.kernel.index * k.chi) throw std::logic_error("rank does not match 1 - index chi");
  k.peripheral_parent = r.presentation.power(r.parse("s t"), 2 * r.n());
  k.peripheral = k.kernel.rewrite(k.peripheral_parent);
  for (const auto& e : k.kernel.expansions) {
    RealMoebius m = r.evaluate(e);
    k.generator_matrices.push_back(m);
    k.generator_matrices.push_back(m.inverse());
  }
  return k;
}

Word expand_kernel_word(const VeechRealization& r, const VeechKernel& k, const Word& w) {
  Word out;
  for (const auto& l : w) {
    const Word& e = k.kernel.expansions.at(l.gen);
    Word p = r.presentation.power(e, l.exp);
    out.insert(out.end(), p.begin(), p.end());
  }
  return r.presentation.reduce(out);
}

RealMoebius evaluate_kernel_word(const VeechRealization& r, const VeechKernel& k, const Word& w) {
  RealMoebius m = RealMoebius::identity(r.lambda);
  for (const auto& l : w) {
    const RealMoebius& g = k.generator_matrices.at(2 * l.gen + (l.exp < 0 ? 1 : 0));
    for (long i = 0; i < std::labs(l.exp); ++i) m = m * g;
  }
  return m;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::finite_order: return "finite-order";
    case Verdict::multitwist_power: return "multitwist-power";
    case Verdict::pseudo_anosov: return "pseudoAnosov";
  }
  return "";
}

ClassificationCertificate classify_element(const VeechRealization& r, const Word& w) {
  ClassificationCertificate c;
  Word red = r.presentation.reduce(w);
  c.word = r.presentation.format(red);
  RealMoebius m = r.evaluate(red);
  c.matrix = {fe_string(m.a), fe_string(m.b), fe_string(m.c), fe_string(m.d)};
  FieldElement tr = m.trace();
  c.trace = fe_string(tr);
  c.trace_approx = tr.approx();
  c.kind = classify(m);
  switch (c.kind) {
    case MoebiusKind::identity:
    case MoebiusKind::elliptic:
      c.verdict = Verdict::finite_order;
      c.order = projective_order(m, 2 * r.n());
      break;
    case MoebiusKind::parabolic: c.verdict = Verdict::multitwist_power; break;
    case MoebiusKind::hyperbolic_or_loxodromic: c.verdict = Verdict::pseudo_anosov; break;
  }
  c.basis = "trace";
  c.nu = nu(r, red);
  c.in_kernel = c.nu == std::pair<long, long>{0, 0};
  auto per = conjugate_into_cyclic(r.presentation, red, r.parse("s t"));
  c.peripheral = per && per->second != 0;
  c.citations = {kTraceTrichotomy};
  c.assumptions = realization_assumptions();
  return c;
}

std::vector<ClassificationCertificate> classify_batch(const VeechRealization& r, const std::vector<Word>& words,
                                                      bool parallel) {
  std::vector<ClassificationCertificate> out(words.size());
  std::vector<std::exception_ptr> errors(words.size());
  const long n = static_cast<long>(words.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = classify_element(r, words[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<int> kernel_trace_batch(const VeechRealization& r, const VeechKernel& k, const std::vector<Word>& words,
                                    bool parallel) {
  std::vector<int> out(words.size());
  std::vector<std::exception_ptr> errors(words.size());
  const long n = static_cast<long>(words.size());
  const FieldElement four(r.field, Rational(4));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      FieldElement t = evaluate_kernel_word(r, k, words[i]).trace();
      out[i] = compare(t * t, four);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------

Combination build_combination(int g, int P, const std::vector<long>& powers) {
  if (g < 2) throw std::invalid_argument("genus must be at least 2");
  if (P < 2) throw std::invalid_argument("at least two factors are required");
  if (static_cast<int>(powers.size()) != P - 1) throw std::invalid_argument("need P - 1 powers k_2..k_P");
  long prev = 0;
  for (long k : powers) {
    if (k <= prev) throw std::invalid_argument("powers must be positive and strictly increasing");
    prev = k;
  }
  Combination c;
  c.g = g;
  c.factors = P;
  c.realization = hecke_realization(g);
  c.kernel = kernel_presentation(c.realization);
  const int rank = c.kernel.kernel.presentation.rank();
  for (int i = 1; i <= P; ++i) {
    std::vector<std::string> names;
    for (int j = 1; j <= rank; ++j) names.push_back("x" + std::to_string(j) + "_" + std::to_string(i));
    c.spec.factors.push_back(Presentation::free(names));
    c.spec.embeddings.push_back({c.kernel.peripheral});
  }
  c.spec.edge = Presentation::free({"c"});
  c.spec.powers = {0};
  c.spec.powers.insert(c.spec.powers.end(), powers.begin(), powers.end());
  c.spec.assumptions = {
      "h centralizes the edge group",
      "h is pure and pseudo-Anosov on every component of the complement of the gluing curve",
      "the user-supplied powers k_i exceed the non-effective thresholds K_i",
      "factor i is conjugated by h^k_i; traces and orders are unchanged",
  };
  Amalgam check(c.spec);  // validates injectivity of the edge embeddings
  c.chi = graph_of_groups_euler_char(c.spec);
  if (P == 2 && c.chi == 2 * (1 - 2 * g)) {
    Rational genus = (2 - c.chi) / 2;
    c.genus = static_cast<int>(genus.get_num().get_si());
    c.surface_claim = "closed orientable surface group of genus " + std::to_string(*c.genus);
  } else {
    c.surface_claim = "no surface-group claim";
  }
  return c;
}

ClassificationCertificate classify_in_combination(const Combination& comb, std::string_view text) {
  Amalgam am(comb.spec);
  AmalgamWord w = am.parse(text);
  auto [nf, u] = am.cyclically_reduce(w);
  const auto& r = comb.realization;
  ClassificationCertificate cert;
  auto attach = [&](ClassificationCertificate c) {
    c.word = std::string(text);
    c.normal_form = am.format(nf);
    c.conjugator = am.format(u);
    return c;
  };
  if (nf.type == 1) {
    Word parent = r.presentation.power(comb.kernel.peripheral_parent, nf.residual);
    return attach(classify_element(r, parent));
  }
  if (nf.type == 2) {
    const auto& syl = nf.syllables.front();
    Word kw = syl.word;
    Word pe = comb.spec.factors[syl.factor].power(comb.kernel.peripheral, nf.residual);
    kw = comb.spec.factors[syl.factor].multiply(kw, pe);
    auto c = classify_element(r, expand_kernel_word(r, comb.kernel, kw));
    c.assumptions.push_back(comb.spec.assumptions.back());
    return attach(c);
  }
  cert.kind = MoebiusKind::hyperbolic_or_loxodromic;
  cert.verdict = Verdict::pseudo_anosov;
  cert.basis = "combination theorem";
  cert.citations = {kCombination};
  cert.assumptions = comb.spec.assumptions;
  for (const auto& a : realization_assumptions()) cert.assumptions.push_back(a);
  cert.in_kernel = true;
  return attach(cert);
}

}  // namespace veechcomb
