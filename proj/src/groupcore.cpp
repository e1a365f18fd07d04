#include "veechcomb/groupcore.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace veechcomb {

namespace {

long mod(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string inverse_symbol(const std::string& s) {
  std::string r = s;
  r[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(r[0])));
  return r;
}

// Free reduction only, ignoring generator orders.
Word free_reduce(const Word& w) {
  Word out;
  for (const Letter& l : w) {
    if (l.exp == 0) continue;
    if (!out.empty() && out.back().gen == l.gen) {
      long e = out.back().exp + l.exp;
      out.pop_back();
      if (e != 0) out.push_back({l.gen, e});
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word free_inverse(const Word& w) {
  Word r;
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back({it->gen, -it->exp});
  return r;
}

}  // namespace

std::string to_string(PresentationKind kind) {
  switch (kind) {
    case PresentationKind::free: return "free";
    case PresentationKind::finite_cyclic: return "finite_cyclic";
    case PresentationKind::free_product_of_cyclics: return "free_product_of_cyclics";
    case PresentationKind::surface: return "surface";
    case PresentationKind::generic: return "generic";
  }
  return "generic";
}

PresentationKind parse_presentation_kind(std::string_view s) {
  if (s == "free") return PresentationKind::free;
  if (s == "finite_cyclic" || s == "finite-cyclic" || s == "cyclic") return PresentationKind::finite_cyclic;
  if (s == "free_product_of_cyclics" || s == "free-product-of-cyclics") return PresentationKind::free_product_of_cyclics;
  if (s == "surface") return PresentationKind::surface;
  if (s == "generic") return PresentationKind::generic;
  throw std::invalid_argument("unknown presentation kind: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Presentation

Presentation::Presentation(std::vector<std::string> generators, std::vector<Word> relators, PresentationKind kind)
    : gens_(std::move(generators)), relators_(std::move(relators)), kind_(kind), orders_(gens_.size(), 0) {
  std::set<std::string> seen;
  for (const auto& g : gens_) {
    if (g.empty() || !std::islower(static_cast<unsigned char>(g[0])))
      throw std::invalid_argument("generator symbols must start with a lowercase letter: '" + g + "'");
    if (!seen.insert(g).second) throw std::invalid_argument("duplicate generator " + g);
  }
  for (const auto& r : relators_)
    for (const auto& l : r)
      if (l.gen < 0 || l.gen >= rank()) throw std::invalid_argument("relator uses an unknown generator");

  switch (kind_) {
    case PresentationKind::free:
      if (!relators_.empty()) throw std::invalid_argument("free presentation with relators");
      break;
    case PresentationKind::finite_cyclic:
    case PresentationKind::free_product_of_cyclics:
      if (kind_ == PresentationKind::finite_cyclic && (rank() != 1 || relators_.size() != 1))
        throw std::invalid_argument("finite cyclic presentation needs one generator and one relator");
      for (const auto& r : relators_) {
        Word fr = free_reduce(r);
        if (fr.size() != 1) throw std::invalid_argument("relator is not a generator power");
        int g = fr[0].gen;
        if (orders_[g] != 0) throw std::invalid_argument("two power relators on one generator");
        orders_[g] = std::labs(fr[0].exp);
      }
      break;
    case PresentationKind::surface:
    case PresentationKind::generic:
      break;
  }
}

Presentation Presentation::free(std::vector<std::string> generators) {
  return Presentation(std::move(generators), {}, PresentationKind::free);
}

Presentation Presentation::cyclic(std::string generator, long order) {
  if (order < 1) throw std::invalid_argument("cyclic order must be positive");
  return Presentation({std::move(generator)}, {{{0, order}}}, PresentationKind::finite_cyclic);
}

Presentation Presentation::free_product_of_cyclics(std::vector<std::string> generators, std::vector<long> orders) {
  if (generators.size() != orders.size()) throw std::invalid_argument("orders and generators differ in length");
  std::vector<Word> rels;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 0) throw std::invalid_argument("negative order");
    if (orders[i] > 0) rels.push_back({{static_cast<int>(i), orders[i]}});
  }
  return Presentation(std::move(generators), std::move(rels), PresentationKind::free_product_of_cyclics);
}

Presentation Presentation::surface(int genus) {
  if (genus < 1) throw std::invalid_argument("surface genus must be positive");
  std::vector<std::string> gens;
  Word rel;
  for (int i = 0; i < genus; ++i) {
    gens.push_back("a" + std::to_string(i + 1));
    gens.push_back("b" + std::to_string(i + 1));
    int a = 2 * i, b = 2 * i + 1;
    rel.insert(rel.end(), {{a, 1}, {b, 1}, {a, -1}, {b, -1}});
  }
  return Presentation(std::move(gens), {rel}, PresentationKind::surface);
}

bool Presentation::has_solvable_word_problem() const {
  return kind_ == PresentationKind::free || kind_ == PresentationKind::finite_cyclic ||
         kind_ == PresentationKind::free_product_of_cyclics;
}

void Presentation::require_solvable(const char* what) const {
  if (!has_solvable_word_problem())
    throw WordProblemUnavailable(std::string("word problem unavailable for ") + to_string(kind_) +
                                 " presentation (" + what + ")");
}

int Presentation::index_of(std::string_view symbol) const {
  for (int i = 0; i < rank(); ++i)
    if (gens_[i] == symbol) return i;
  return -1;
}

Word Presentation::parse(std::string_view text) const {
  Word w;
  for (const auto& tok : split_ws(text)) {
    if (tok == "1") continue;
    std::string sym = tok;
    long e = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      sym = tok.substr(0, caret);
      std::string es = tok.substr(caret + 1);
      std::size_t used = 0;
      try {
        e = std::stol(es, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (es.empty() || used != es.size()) throw MalformedWord("bad exponent in token '" + tok + "'");
    }
    if (sym.empty()) throw MalformedWord("empty symbol in token '" + tok + "'");
    int g = index_of(sym);
    if (g >= 0) {
      w.push_back({g, e});
      continue;
    }
    std::string lower = sym;
    lower[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lower[0])));
    if (std::isupper(static_cast<unsigned char>(sym[0])) && (g = index_of(lower)) >= 0) {
      w.push_back({g, -e});
      continue;
    }
    // Juxtaposed single-character symbols, e.g. "stST".
    if (tok.find('^') == std::string::npos) {
      Word run;
      bool ok = true;
      for (char ch : sym) {
        std::string one(1, ch);
        std::string lo(1, static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        if (int k = index_of(one); k >= 0) {
          run.push_back({k, 1});
        } else if (std::isupper(static_cast<unsigned char>(ch)) && (k = index_of(lo)) >= 0) {
          run.push_back({k, -1});
        } else {
          ok = false;
          break;
        }
      }
      if (ok) {
        w.insert(w.end(), run.begin(), run.end());
        continue;
      }
    }
    throw MalformedWord("unknown symbol '" + sym + "'");
  }
  return w;
}

std::string Presentation::format(const Word& w) const {
  if (w.empty()) return "1";
  std::string out;
  for (const auto& l : w) {
    if (!out.empty()) out += ' ';
    const std::string& s = gens_.at(l.gen);
    out += l.exp < 0 ? inverse_symbol(s) : s;
    if (std::labs(l.exp) != 1) out += "^" + std::to_string(std::labs(l.exp));
  }
  return out;
}

Word Presentation::reduce(const Word& w) const {
  Word out;
  for (const Letter& l : w) {
    if (l.gen < 0 || l.gen >= rank()) throw std::out_of_range("letter outside the presentation");
    long e = l.exp;
    if (!out.empty() && out.back().gen == l.gen) {
      e += out.back().exp;
      out.pop_back();
    }
    if (long n = orders_[l.gen]; n > 0) e = mod(e, n);
    if (e != 0) out.push_back({l.gen, e});
  }
  return out;
}

Word Presentation::multiply(const Word& a, const Word& b) const { return reduce(concat(a, b)); }

Word Presentation::inverse(const Word& w) const { return reduce(free_inverse(w)); }

Word Presentation::power(const Word& w, long m) const {
  Word base = m >= 0 ? reduce(w) : inverse(w);
  Word out;
  for (long i = 0; i < std::labs(m); ++i) out.insert(out.end(), base.begin(), base.end());
  return reduce(out);
}

long Presentation::length(const Word& w) const {
  long n = 0;
  for (const auto& l : w) n += orders_.at(l.gen) > 0 ? 1 : std::labs(l.exp);
  return n;
}

namespace {

// Atoms: unit letters of infinite-order generators, whole syllables of
// finite-order ones. Cyclic words are compared atom by atom.
std::vector<Letter> atoms_of(const Presentation& p, const Word& w) {
  std::vector<Letter> out;
  for (const auto& l : w) {
    if (p.order_of_generator(l.gen) > 0) {
      out.push_back(l);
    } else {
      long s = l.exp > 0 ? 1 : -1;
      for (long i = 0; i < std::labs(l.exp); ++i) out.push_back({l.gen, s});
    }
  }
  return out;
}

// w == c * core * c^-1, core cyclically reduced.
std::pair<Word, std::vector<Letter>> cyclic_core(const Presentation& p, const Word& w) {
  std::deque<Letter> a;
  for (const auto& l : atoms_of(p, p.reduce(w))) a.push_back(l);
  Word c;
  while (a.size() >= 2 && a.front().gen == a.back().gen) {
    Letter f = a.front(), b = a.back();
    long n = p.order_of_generator(f.gen);
    if (n == 0) {
      if (f.exp != -b.exp) break;
      c.push_back(f);
      a.pop_front();
      a.pop_back();
    } else {
      // b f (rest) = b w b^-1, so w = b^-1 (b f rest) b.
      c.push_back({b.gen, -b.exp});
      a.pop_back();
      a.pop_front();
      long e = mod(f.exp + b.exp, n);
      if (e != 0) a.push_front({f.gen, e});
    }
  }
  return {p.reduce(c), std::vector<Letter>(a.begin(), a.end())};
}

Word from_atoms(const Presentation& p, const std::vector<Letter>& a, std::size_t from, std::size_t to) {
  return p.reduce(Word(a.begin() + static_cast<long>(from), a.begin() + static_cast<long>(to)));
}

}  // namespace

long Presentation::element_order(const Word& w) const {
  require_solvable("element order");
  auto [c, core] = cyclic_core(*this, w);
  if (core.empty()) return 1;
  if (core.size() == 1) {
    long n = orders_[core[0].gen];
    if (n > 0) return n / std::gcd(n, core[0].exp);
  }
  return 0;
}

std::optional<Rational> Presentation::euler_characteristic() const {
  switch (kind_) {
    case PresentationKind::free: return Rational(1 - rank());
    case PresentationKind::finite_cyclic: return Rational(1, orders_[0]);
    case PresentationKind::free_product_of_cyclics: {
      Rational chi = 0;
      for (long n : orders_) chi += n > 0 ? Rational(1, n) : Rational(0);
      return chi - Rational(rank() - 1);
    }
    case PresentationKind::surface:
      if (relators_.size() == 1 && rank() % 2 == 0) return Rational(2 - rank());
      return std::nullopt;
    case PresentationKind::generic: return std::nullopt;
  }
  return std::nullopt;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

std::optional<std::pair<Word, long>> conjugate_into_cyclic(const Presentation& pres, const Word& w, const Word& p) {
  if (!pres.has_solvable_word_problem())
    throw WordProblemUnavailable("conjugate_into_cyclic needs a solvable presentation");
  auto [cw, aw] = cyclic_core(pres, w);
  if (aw.empty()) return std::make_pair(Word{}, 0L);
  auto [cp, ap] = cyclic_core(pres, p);
  if (ap.empty()) return std::nullopt;

  auto finish = [&](const Word& s_inv, long m) {
    // w = cw S^-1 core_p^m S cw^-1 and core_p^m = cp^-1 p^m cp.
    Word u = pres.multiply(pres.multiply(cw, s_inv), pres.inverse(cp));
    return std::make_optional(std::make_pair(u, m));
  };

  if (ap.size() == 1) {
    Letter x = ap[0];
    long n = pres.order_of_generator(x.gen);
    if (n > 0) {
      if (aw.size() != 1 || aw[0].gen != x.gen) return std::nullopt;
      for (long m = 1; m < n; ++m)
        if (mod(m * x.exp - aw[0].exp, n) == 0) return finish({}, m);
      return std::nullopt;
    }
    for (const auto& l : aw)
      if (l.gen != x.gen || l.exp != aw[0].exp) return std::nullopt;
    long m = static_cast<long>(aw.size()) * (aw[0].exp == x.exp ? 1 : -1);
    return finish({}, m);
  }

  if (aw.size() % ap.size() != 0) return std::nullopt;
  long k = static_cast<long>(aw.size() / ap.size());
  for (long m : {k, -k}) {
    std::vector<Letter> pm = atoms_of(pres, pres.power(pres.reduce(Word(ap.begin(), ap.end())), m));
    if (pm.size() != aw.size()) continue;
    for (std::size_t r = 0; r < pm.size(); ++r) {
      if (std::equal(aw.begin(), aw.end() - static_cast<long>(r), pm.begin() + static_cast<long>(r)) &&
          std::equal(aw.end() - static_cast<long>(r), aw.end(), pm.begin())) {
        Word s = from_atoms(pres, pm, 0, r);
        return finish(pres.inverse(s), m);
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Amalgam

Amalgam::Amalgam(AmalgamSpec spec) : spec_(std::move(spec)) {
  const int P = factor_count();
  if (P < 1) throw std::invalid_argument("amalgam needs at least one factor");
  for (const auto& f : spec_.factors)
    if (!f.has_solvable_word_problem())
      throw WordProblemUnavailable("word problem unavailable for a " + to_string(f.kind()) + " factor");
  const Presentation& e = spec_.edge;
  if (e.rank() == 0) {
    trivial_edge_ = true;
  } else if (e.rank() == 1 && e.has_solvable_word_problem()) {
    edge_order_ = e.order_of_generator(0);
  } else {
    throw std::invalid_argument("edge group must be cyclic or trivial");
  }
  if (static_cast<int>(spec_.embeddings.size()) != P)
    throw std::invalid_argument("one embedding per factor is required");
  for (int i = 0; i < P; ++i) {
    if (static_cast<int>(spec_.embeddings[i].size()) != e.rank())
      throw std::invalid_argument("embedding must give one image per edge generator");
    if (!trivial_edge_) {
      Word img = spec_.factors[i].reduce(spec_.embeddings[i][0]);
      if (spec_.factors[i].element_order(img) != edge_order_)
        throw std::invalid_argument("embedding of the edge group into factor " + std::to_string(i + 1) +
                                    " is not injective");
      edge_images_.push_back(img);
    } else {
      edge_images_.push_back({});
    }
  }
  if (!spec_.powers.empty()) {
    if (static_cast<int>(spec_.powers.size()) != P) throw std::invalid_argument("one power per factor");
    if (spec_.powers[0] != 0) throw std::invalid_argument("first power must be 0");
    for (int i = 1; i < P; ++i)
      if (spec_.powers[i] <= spec_.powers[i - 1]) throw std::invalid_argument("powers must be strictly increasing");
  }
  for (int i = 0; i < P; ++i)
    for (int g = 0; g < spec_.factors[i].rank(); ++g)
      if (!symbols_.emplace(spec_.factors[i].generators()[g], std::make_pair(i, g)).second)
        throw std::invalid_argument("symbol shared between factors: " + spec_.factors[i].generators()[g]);
  for (int g = 0; g < e.rank(); ++g)
    if (!symbols_.emplace(e.generators()[g], std::make_pair(-1, g)).second)
      throw std::invalid_argument("edge symbol clashes with a factor symbol: " + e.generators()[g]);
}

long Amalgam::normalize_edge(long e) const {
  if (trivial_edge_) return 0;
  return edge_order_ > 0 ? mod(e, edge_order_) : e;
}

Word Amalgam::edge_power(int factor, long e) const {
  if (trivial_edge_ || e == 0) return {};
  return spec_.factors[factor].power(edge_images_[factor], e);
}

std::optional<long> Amalgam::edge_exponent(int factor, const Word& x) const {
  const Presentation& F = spec_.factors[factor];
  Word r = F.reduce(x);
  if (r.empty()) return 0L;
  if (trivial_edge_) return std::nullopt;
  if (edge_order_ > 0) {
    for (long e = 1; e < edge_order_; ++e)
      if (edge_power(factor, e) == r) return e;
    return std::nullopt;
  }
  long lx = F.length(r);
  for (long m = 1;; ++m) {
    Word pos = edge_power(factor, m), neg = edge_power(factor, -m);
    if (pos == r) return m;
    if (neg == r) return -m;
    if (F.length(pos) > lx && F.length(neg) > lx) return std::nullopt;
  }
}

std::pair<Word, long> Amalgam::coset_split(int factor, const Word& x) const {
  const Presentation& F = spec_.factors[factor];
  Word r = F.reduce(x);
  if (trivial_edge_) return {r, 0};
  auto better = [&](const Word& a, const Word& b) {
    long la = F.length(a), lb = F.length(b);
    return la != lb ? la < lb : a < b;
  };
  Word best = r;
  long best_m = 0;
  if (edge_order_ > 0) {
    for (long m = 1; m < edge_order_; ++m) {
      Word cand = F.multiply(r, edge_power(factor, m));
      if (better(cand, best)) best = cand, best_m = m;
    }
  } else {
    long lx = F.length(r);
    for (long m = 1;; ++m) {
      bool any = false;
      for (long s : {m, -m}) {
        Word pm = edge_power(factor, s);
        if (F.length(pm) - lx > F.length(best)) continue;
        any = true;
        Word cand = F.multiply(r, pm);
        if (better(cand, best)) best = cand, best_m = s;
      }
      if (!any) break;
    }
  }
  // x = best * c^-m
  return {best, normalize_edge(-best_m)};
}

AmalgamWord Amalgam::parse(std::string_view text) const {
  AmalgamWord w;
  for (const auto& tok : split_ws(text)) {
    if (tok == "1") continue;
    std::string sym = tok;
    std::string suffix;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      sym = tok.substr(0, caret);
      suffix = tok.substr(caret);
    }
    if (sym.empty()) throw MalformedWord("empty symbol in token '" + tok + "'");
    bool inv = false;
    auto it = symbols_.find(sym);
    if (it == symbols_.end() && std::isupper(static_cast<unsigned char>(sym[0]))) {
      std::string lower = sym;
      lower[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lower[0])));
      it = symbols_.find(lower);
      inv = true;
    }
    if (it == symbols_.end()) throw MalformedWord("unknown symbol '" + sym + "'");
    auto [f, g] = it->second;
    const Presentation& P = f < 0 ? spec_.edge : spec_.factors[f];
    Word one = P.parse(P.generators()[g] + suffix);
    for (auto l : one) w.push_back({f, {l.gen, inv ? -l.exp : l.exp}});
  }
  return w;
}

std::string Amalgam::format(const AmalgamWord& w) const {
  if (w.empty()) return "1";
  std::string out;
  for (const auto& l : w) {
    const Presentation& P = l.factor < 0 ? spec_.edge : spec_.factors[l.factor];
    if (!out.empty()) out += ' ';
    out += P.format({l.letter});
  }
  return out;
}

std::string Amalgam::format(const NormalForm& nf) const { return format(to_word(nf)); }

AmalgamWord Amalgam::to_word(const NormalForm& nf) const {
  AmalgamWord w;
  for (const auto& s : nf.syllables)
    for (const auto& l : s.word) w.push_back({s.factor, l});
  if (nf.residual != 0 && !trivial_edge_) w.push_back({-1, {0, nf.residual}});
  return w;
}

NormalForm Amalgam::normal_form(const AmalgamWord& w) const {
  std::vector<Syllable> stack;
  long lead = 0;

  // Multiplies the current element on the right by x in factor f.
  std::function<void(int, Word)> push = [&](int f, Word x) {
    for (;;) {
      const Presentation& F = spec_.factors[f];
      if (stack.empty() && lead != 0) {
        x = F.multiply(edge_power(f, lead), x);
        lead = 0;
      }
      if (!stack.empty() && stack.back().factor == f) {
        x = F.multiply(stack.back().word, x);
        stack.pop_back();
      }
      x = F.reduce(x);
      auto e = edge_exponent(f, x);
      if (!e) {
        stack.push_back({f, std::move(x)});
        return;
      }
      if (stack.empty()) {
        lead = normalize_edge(lead + *e);
        return;
      }
      // Absorb the edge element into the previous syllable.
      Syllable top = std::move(stack.back());
      stack.pop_back();
      f = top.factor;
      x = spec_.factors[f].multiply(top.word, edge_power(f, *e));
    }
  };

  for (const auto& l : w) {
    if (l.factor < 0) {
      if (trivial_edge_) throw MalformedWord("edge letter in an amalgam over the trivial group");
      long e = spec_.edge.reduce({l.letter}).empty() ? 0 : l.letter.exp;
      if (e == 0) continue;
      if (stack.empty()) {
        lead = normalize_edge(lead + e);
      } else {
        Syllable top = std::move(stack.back());
        stack.pop_back();
        push(top.factor, spec_.factors[top.factor].multiply(top.word, edge_power(top.factor, e)));
      }
    } else {
      if (l.factor >= factor_count()) throw std::out_of_range("amalgam letter outside the factors");
      push(l.factor, Word{l.letter});
    }
  }

  NormalForm nf;
  if (stack.empty()) {
    nf.type = 1;
    nf.residual = lead;
    return nf;
  }
  long carry = 0;
  for (auto& s : stack) {
    const Presentation& F = spec_.factors[s.factor];
    Word x = F.multiply(edge_power(s.factor, carry), s.word);
    auto [rep, e] = coset_split(s.factor, x);
    nf.syllables.push_back({s.factor, std::move(rep)});
    carry = e;
  }
  nf.residual = carry;
  nf.type = nf.syllables.size() == 1 ? 2 : 3;
  return nf;
}

std::pair<NormalForm, AmalgamWord> Amalgam::cyclically_reduce(const AmalgamWord& w) const {
  AmalgamWord cur = w;
  AmalgamWord u;
  auto inverse_of = [&](const AmalgamWord& x) {
    AmalgamWord r;
    for (auto it = x.rbegin(); it != x.rend(); ++it) r.push_back({it->factor, {it->letter.gen, -it->letter.exp}});
    return r;
  };
  for (;;) {
    NormalForm nf = normal_form(cur);
    if (nf.syllables.size() < 2 || nf.syllables.front().factor != nf.syllables.back().factor)
      return {nf, to_word(normal_form(u))};
    // cur = rest * z with z = last syllable c^e; conjugate to z * rest.
    NormalForm zn;
    zn.syllables = {nf.syllables.back()};
    zn.residual = nf.residual;
    AmalgamWord z = to_word(zn);
    NormalForm rest = nf;
    rest.syllables.pop_back();
    rest.residual = 0;
    AmalgamWord next = z;
    for (const auto& l : to_word(rest)) next.push_back(l);
    cur = next;
    for (const auto& l : inverse_of(z)) u.push_back(l);
  }
}

// ---------------------------------------------------------------------------
// Euler characteristics

namespace {

Rational chi_or_throw(const Presentation& p) {
  auto chi = p.euler_characteristic();
  if (!chi) throw WordProblemUnavailable("Euler characteristic undefined for a " + to_string(p.kind()) + " presentation");
  return *chi;
}

Rational edge_chi(const Presentation& e) {
  if (e.rank() == 0) return Rational(1);
  return chi_or_throw(e);
}

}  // namespace

Rational graph_of_groups_euler_char(const AmalgamSpec& spec) {
  Rational chi = 0;
  for (const auto& f : spec.factors) chi += chi_or_throw(f);
  long edges = static_cast<long>(spec.factors.size()) - 1;
  return chi - Rational(edges) * edge_chi(spec.edge);
}

Rational hnn_euler_char(const Presentation& base, const Presentation& edge) {
  return chi_or_throw(base) - edge_chi(edge);
}

// ---------------------------------------------------------------------------
// HNN words

HNNWord parse_hnn_word(const Presentation& base, std::string_view stable_symbol, std::string_view text) {
  HNNWord w;
  std::string stable(stable_symbol);
  std::string stable_inv = inverse_symbol(stable);
  for (const auto& tok : split_ws(text)) {
    std::string sym = tok;
    long e = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      sym = tok.substr(0, caret);
      try {
        std::size_t used = 0;
        e = std::stol(tok.substr(caret + 1), &used);
        if (used != tok.size() - caret - 1) throw MalformedWord("bad exponent in '" + tok + "'");
      } catch (const std::logic_error&) {
        throw MalformedWord("bad exponent in '" + tok + "'");
      }
    }
    if (sym == stable || sym == stable_inv) {
      w.items.push_back({true, sym == stable ? e : -e, {}});
    } else {
      w.items.push_back({false, 0, base.parse(tok)});
    }
  }
  return w;
}

HNNWord concat(const HNNWord& a, const HNNWord& b) {
  HNNWord r = a;
  r.items.insert(r.items.end(), b.items.begin(), b.items.end());
  return r;
}

long hnn_eta(const HNNWord& w) {
  long s = 0;
  for (const auto& it : w.items)
    if (it.stable) s += it.exp;
  return s;
}

// ---------------------------------------------------------------------------
// Reidemeister-Schreier

Word KernelPresentation::rewrite(const Word& parent_word) const {
  const int r = parent_copy.rank();
  const std::size_t k = target_orders.size();
  std::vector<long> coset(k, 0);
  auto encode = [&]() {
    long c = 0;
    for (std::size_t i = 0; i < k; ++i) c = c * target_orders[i] + coset[i];
    return c;
  };
  auto step = [&](int g, long s) {
    for (std::size_t i = 0; i < k; ++i) coset[i] = mod(coset[i] + s * images[g][i], target_orders[i]);
  };
  Word out;
  for (const auto& l : parent_word) {
    long s = l.exp > 0 ? 1 : -1;
    for (long i = 0; i < std::labs(l.exp); ++i) {
      if (s > 0) {
        const Word& v = schreier_value[encode() * r + l.gen];
        out.insert(out.end(), v.begin(), v.end());
        step(l.gen, 1);
      } else {
        step(l.gen, -1);
        Word v = free_inverse(schreier_value[encode() * r + l.gen]);
        out.insert(out.end(), v.begin(), v.end());
      }
    }
  }
  if (encode() != 0) throw std::invalid_argument("word is not in the kernel");
  return presentation.reduce(out);
}

KernelPresentation reidemeister_schreier(const Presentation& parent, const std::vector<long>& target_orders,
                                         const std::vector<std::vector<long>>& images,
                                         const std::string& generator_prefix) {
  const int r = parent.rank();
  const std::size_t k = target_orders.size();
  if (static_cast<int>(images.size()) != r) throw std::invalid_argument("one image per generator is required");
  long index = 1;
  for (long n : target_orders) {
    if (n < 1) throw std::invalid_argument("target orders must be positive");
    index *= n;
  }
  for (const auto& im : images)
    if (im.size() != k) throw std::invalid_argument("image has the wrong number of components");

  auto decode = [&](long c) {
    std::vector<long> v(k);
    for (std::size_t i = k; i-- > 0;) {
      v[i] = c % target_orders[i];
      c /= target_orders[i];
    }
    return v;
  };
  auto encode = [&](const std::vector<long>& v) {
    long c = 0;
    for (std::size_t i = 0; i < k; ++i) c = c * target_orders[i] + v[i];
    return c;
  };
  auto act = [&](long c, int g, long s) {
    auto v = decode(c);
    for (std::size_t i = 0; i < k; ++i) v[i] = mod(v[i] + s * images[g][i], target_orders[i]);
    return encode(v);
  };

  for (const auto& rel : parent.relators()) {
    long c = 0;
    for (const auto& l : rel) c = act(c, l.gen, l.exp);
    if (c != 0) throw std::invalid_argument("homomorphism does not respect a relator");
  }

  // Schreier transversal by BFS.
  std::vector<std::optional<Word>> rep(index);
  rep[0] = Word{};
  std::queue<long> q;
  q.push(0);
  while (!q.empty()) {
    long t = q.front();
    q.pop();
    for (int g = 0; g < r; ++g)
      for (long s : {1L, -1L}) {
        long t2 = act(t, g, s);
        if (rep[t2]) continue;
        rep[t2] = free_reduce(concat(*rep[t], Word{{g, s}}));
        q.push(t2);
      }
  }
  for (const auto& x : rep)
    if (!x) throw std::invalid_argument("homomorphism is not surjective");

  const long nsym = index * r;
  std::vector<bool> trivial(nsym), eliminated(nsym, false);
  std::vector<Word> parent_expansion(nsym);
  for (long t = 0; t < index; ++t)
    for (int g = 0; g < r; ++g) {
      Word w = free_reduce(concat(concat(*rep[t], Word{{g, 1}}), free_inverse(*rep[act(t, g, 1)])));
      trivial[t * r + g] = w.empty();
      parent_expansion[t * r + g] = w;
    }

  // Relator rewriting over symbol ids (gen field = symbol id).
  auto rewrite_from = [&](const Word& w, long t) {
    Word out;
    for (const auto& l : w) {
      long s = l.exp > 0 ? 1 : -1;
      for (long i = 0; i < std::labs(l.exp); ++i) {
        if (s > 0) {
          long sym = t * r + l.gen;
          if (!trivial[sym]) out.push_back({static_cast<int>(sym), 1});
          t = act(t, l.gen, 1);
        } else {
          t = act(t, l.gen, -1);
          long sym = t * r + l.gen;
          if (!trivial[sym]) out.push_back({static_cast<int>(sym), -1});
        }
      }
    }
    return free_reduce(out);
  };
  auto cyc = [](Word w) {
    w = free_reduce(w);
    while (w.size() >= 2 && w.front().gen == w.back().gen) {
      long e = w.front().exp + w.back().exp;
      int g = w.front().gen;
      w.erase(w.begin());
      w.pop_back();
      if (w.empty()) {
        if (e != 0) w.push_back({g, e});
        break;
      }
      if (e != 0) w.insert(w.begin(), {g, e});
      w = free_reduce(w);
    }
    return w;
  };

  std::vector<Word> rels;
  for (const auto& rel : parent.relators())
    for (long t = 0; t < index; ++t) {
      Word w = cyc(rewrite_from(rel, t));
      if (!w.empty()) rels.push_back(w);
    }

  // Tietze elimination of symbols occurring exactly once in some relator.
  std::map<int, Word> subst;
  auto substitute = [&](const Word& w, int y, const Word& val) {
    Word out;
    for (const auto& l : w) {
      if (l.gen != y) {
        out.push_back(l);
        continue;
      }
      Word v = l.exp > 0 ? val : free_inverse(val);
      for (long i = 0; i < std::labs(l.exp); ++i) out.insert(out.end(), v.begin(), v.end());
    }
    return free_reduce(out);
  };
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t ri = 0; ri < rels.size() && !progress; ++ri) {
      const Word& R = rels[ri];
      std::map<int, int> count;
      for (const auto& l : R) count[l.gen] += static_cast<int>(std::labs(l.exp));
      int pos = -1;
      for (int i = static_cast<int>(R.size()) - 1; i >= 0; --i)
        if (count[R[i].gen] == 1 && (pos < 0 || R[i].gen > R[pos].gen)) pos = i;
      if (pos < 0) continue;
      int y = R[pos].gen;
      Word A(R.begin(), R.begin() + pos), B(R.begin() + pos + 1, R.end());
      // A y^e B = 1
      Word val = R[pos].exp > 0 ? free_reduce(concat(free_inverse(A), free_inverse(B))) : free_reduce(concat(B, A));
      subst[y] = val;
      eliminated[y] = true;
      rels.erase(rels.begin() + static_cast<long>(ri));
      for (auto& w : rels) w = cyc(substitute(w, y, val));
      rels.erase(std::remove_if(rels.begin(), rels.end(), [](const Word& w) { return w.empty(); }), rels.end());
      progress = true;
    }
  }

  std::vector<int> new_index(nsym, -1);
  std::vector<std::string> names;
  KernelPresentation kp;
  for (long s = 0; s < nsym; ++s)
    if (!trivial[s] && !eliminated[s]) {
      new_index[s] = static_cast<int>(names.size());
      names.push_back(generator_prefix + std::to_string(names.size() + 1));
      kp.expansions.push_back(parent.reduce(parent_expansion[s]));
    }

  std::vector<std::optional<Word>> memo(nsym);
  std::function<Word(long)> resolve = [&](long s) -> Word {
    if (memo[s]) return *memo[s];
    Word out;
    if (trivial[s]) {
    } else if (!eliminated[s]) {
      out = {{new_index[s], 1}};
    } else {
      for (const auto& l : subst.at(static_cast<int>(s))) {
        Word v = resolve(l.gen);
        if (l.exp < 0) v = free_inverse(v);
        for (long i = 0; i < std::labs(l.exp); ++i) out.insert(out.end(), v.begin(), v.end());
      }
      out = free_reduce(out);
    }
    memo[s] = out;
    return out;
  };

  std::vector<Word> new_rels;
  for (const auto& R : rels) {
    Word w;
    for (const auto& l : R) w = concat(w, l.exp > 0 ? resolve(l.gen) : free_inverse(resolve(l.gen)));
    new_rels.push_back(free_reduce(w));
  }
  kp.presentation = new_rels.empty() ? Presentation::free(names)
                                     : Presentation(names, new_rels, PresentationKind::generic);
  kp.index = index;
  kp.target_orders = target_orders;
  kp.images = images;
  kp.parent_copy = parent;
  kp.schreier_value.resize(nsym);
  for (long s = 0; s < nsym; ++s) kp.schreier_value[s] = resolve(s);
  return kp;
}

}  // namespace veechcomb
