#pragma once

#include "veechcomb/rational.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace veechcomb {

/// A word that cannot be parsed against a presentation's alphabet.
struct MalformedWord : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Requested a decision procedure the presentation kind does not support.
struct WordProblemUnavailable : std::logic_error {
  using std::logic_error::logic_error;
};

struct Letter {
  int gen = 0;
  long exp = 0;
  bool operator==(const Letter&) const = default;
  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;

enum class PresentationKind { free, finite_cyclic, free_product_of_cyclics, surface, generic };

std::string to_string(PresentationKind kind);
PresentationKind parse_presentation_kind(std::string_view s);

/// Group presentation with a kind tag. Tagged kinds other than `surface` and
/// `generic` carry a per-generator order (0 = infinite) and have a solvable
/// word problem via canonical reduction.
class Presentation {
 public:
  Presentation() = default;
  Presentation(std::vector<std::string> generators, std::vector<Word> relators, PresentationKind kind);

  static Presentation free(std::vector<std::string> generators);
  static Presentation cyclic(std::string generator, long order);
  /// orders[i] == 0 marks an infinite cyclic factor.
  static Presentation free_product_of_cyclics(std::vector<std::string> generators, std::vector<long> orders);
  /// Closed orientable surface group <a1,b1,...| [a1,b1]...[ak,bk]>.
  static Presentation surface(int genus);

  const std::vector<std::string>& generators() const { return gens_; }
  const std::vector<Word>& relators() const { return relators_; }
  PresentationKind kind() const { return kind_; }
  int rank() const { return static_cast<int>(gens_.size()); }
  long order_of_generator(int g) const { return orders_.at(g); }
  bool has_solvable_word_problem() const;

  /// Index of a generator symbol, or -1.
  int index_of(std::string_view symbol) const;

  /// Whitespace-separated tokens `sym`, `sym^e`; a leading uppercase letter
  /// denotes the inverse ("S" = s^-1). Empty string or "1" is the identity.
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;

  /// Canonical form: free reduction plus exponents of finite-order
  /// generators taken in [1, n-1].
  Word reduce(const Word& w) const;
  Word multiply(const Word& a, const Word& b) const;
  Word inverse(const Word& w) const;
  Word power(const Word& w, long m) const;
  bool is_identity(const Word& w) const { return reduce(w).empty(); }
  bool equal(const Word& a, const Word& b) const { return reduce(a) == reduce(b); }

  /// Length used for canonical coset representatives: |e| per letter of an
  /// infinite-order generator, 1 per syllable of a finite-order generator.
  long length(const Word& w) const;

  /// Order of an element (0 = infinite). Requires a solvable kind.
  long element_order(const Word& w) const;

  std::optional<Rational> euler_characteristic() const;

 private:
  void require_solvable(const char* what) const;

  std::vector<std::string> gens_;
  std::vector<Word> relators_;
  PresentationKind kind_ = PresentationKind::free;
  std::vector<long> orders_;
};

Word concat(const Word& a, const Word& b);

/// Returns (u, m) with w == u p^m u^-1 when the cyclic reduction of w is a
/// cyclic rotation of (the cyclic reduction of) p^m; otherwise nullopt.
/// The identity gives (1, 0).
std::optional<std::pair<Word, long>> conjugate_into_cyclic(const Presentation& pres, const Word& w, const Word& p);

// ---------------------------------------------------------------------------
// Amalgamated products

/// Presentation data of G_1 *_{G_0} ... *_{G_0} G_P, together with the formal
/// powers k_i of the symbol h used to conjugate the factors.
struct AmalgamSpec {
  std::vector<Presentation> factors;
  Presentation edge;
  /// embeddings[i][j] = image of edge generator j in factor i.
  std::vector<std::vector<Word>> embeddings;
  /// powers[0] == 0; strictly increasing when supplied.
  std::vector<long> powers;
  /// Named assumptions carried into every certificate built on this spec.
  std::vector<std::string> assumptions;
};

struct Syllable {
  int factor = 0;
  Word word;
  bool operator==(const Syllable&) const = default;
};

/// Alternating normal form g = s_1 ... s_r c^e, with s_j canonical
/// representatives of cosets s_j G_0 (edge letters pushed right greedily).
struct NormalForm {
  int type = 1;  // 1: in G_0, 2: in some G_i \ G_0, 3: alternating product
  std::vector<Syllable> syllables;
  long residual = 0;  // exponent of the edge generator c
  bool operator==(const NormalForm&) const = default;
};

/// Letter over the amalgam alphabet; factor == -1 denotes the edge group.
struct AmalgamLetter {
  int factor = 0;
  Letter letter;
};
using AmalgamWord = std::vector<AmalgamLetter>;

/// Validated amalgam with normal forms. The edge group must be cyclic
/// (finite, infinite or trivial) and the factors of a solvable kind.
class Amalgam {
 public:
  explicit Amalgam(AmalgamSpec spec);

  const AmalgamSpec& spec() const { return spec_; }
  int factor_count() const { return static_cast<int>(spec_.factors.size()); }
  /// Order of the edge generator (0 = infinite); meaningless for a trivial edge.
  long edge_order() const { return edge_order_; }
  bool trivial_edge() const { return trivial_edge_; }
  /// Image of c in factor i.
  const Word& edge_image(int i) const { return edge_images_[i]; }

  AmalgamWord parse(std::string_view text) const;
  std::string format(const AmalgamWord& w) const;
  std::string format(const NormalForm& nf) const;

  NormalForm normal_form(const AmalgamWord& w) const;
  AmalgamWord to_word(const NormalForm& nf) const;
  bool equal(const AmalgamWord& a, const AmalgamWord& b) const { return normal_form(a) == normal_form(b); }

  /// Conjugates w until its normal form is cyclically alternating (first and
  /// last syllables in different factors) or lies in a single factor.
  /// Returns (normal form of the conjugate, conjugator u) with the conjugate
  /// equal to u^-1 w u.
  std::pair<NormalForm, AmalgamWord> cyclically_reduce(const AmalgamWord& w) const;

  /// x = rep * c^e with rep the canonical representative of x G_0.
  std::pair<Word, long> coset_split(int factor, const Word& x) const;
  /// e with x == c^e in factor i, if x lies in the edge group.
  std::optional<long> edge_exponent(int factor, const Word& x) const;

 private:
  long normalize_edge(long e) const;
  Word edge_power(int factor, long e) const;

  AmalgamSpec spec_;
  std::vector<Word> edge_images_;
  long edge_order_ = 0;
  bool trivial_edge_ = false;
  std::map<std::string, std::pair<int, int>, std::less<>> symbols_;  // symbol -> (factor or -1, gen)
};

/// Sum of vertex Euler characteristics minus (P - 1) copies of the edge one.
/// Throws WordProblemUnavailable when some characteristic is undefined.
Rational graph_of_groups_euler_char(const AmalgamSpec& spec);
/// chi(base) - chi(edge) for an HNN extension over the given edge group.
Rational hnn_euler_char(const Presentation& base, const Presentation& edge);

// ---------------------------------------------------------------------------
// HNN words

/// Word in a trivial HNN extension: base-group letters interleaved with
/// powers of the stable letter.
struct HNNWord {
  struct Item {
    bool stable = false;
    long exp = 0;  // stable-letter exponent when stable
    Word base;     // base-group word otherwise
  };
  std::vector<Item> items;
};

HNNWord parse_hnn_word(const Presentation& base, std::string_view stable_symbol, std::string_view text);
HNNWord concat(const HNNWord& a, const HNNWord& b);
long hnn_eta(const HNNWord& w);

// ---------------------------------------------------------------------------
// Reidemeister-Schreier

/// Kernel of a homomorphism onto a finite abelian group, rewritten as a
/// presentation on Schreier generators after Tietze elimination.
struct KernelPresentation {
  Presentation presentation;
  /// Expansion of kernel generator x_j as a word in the parent generators.
  std::vector<Word> expansions;
  long index = 0;

  /// Rewrites a parent word lying in the kernel into kernel generators.
  Word rewrite(const Word& parent_word) const;

  // Rewriting data.
  std::vector<long> target_orders;
  std::vector<std::vector<long>> images;
  Presentation parent_copy;
  /// schreier_value[coset * rank + gen] = kernel word of that Schreier symbol.
  std::vector<Word> schreier_value;
};

/// Throws std::invalid_argument for a non-surjective or ill-defined map.
KernelPresentation reidemeister_schreier(const Presentation& parent, const std::vector<long>& target_orders,
                                         const std::vector<std::vector<long>>& images,
                                         const std::string& generator_prefix = "x");

}  // namespace veechcomb
