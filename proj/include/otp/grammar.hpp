// The context-free opinion grammar: symbolic rules with their families, the
// post-pruning label set, binarization, and the instantiated chart grammar
// the CKY decoder runs over.

#ifndef OTP_GRAMMAR_HPP
#define OTP_GRAMMAR_HPP

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "otp/symbol.hpp"
#include "otp/tree.hpp"

namespace otp {

enum class RuleFamily { Basic, OneToMany, MonoImplicit, BiImplicit, CrossMapping };

inline constexpr std::array<RuleFamily, 4> kConditionalFamilies = {
    RuleFamily::OneToMany, RuleFamily::MonoImplicit, RuleFamily::BiImplicit, RuleFamily::CrossMapping};

std::string_view to_string(RuleFamily f);
std::optional<RuleFamily> family_from_string(std::string_view s);

struct Rule {
  Symbol lhs;
  std::vector<Symbol> rhs;  // empty = epsilon
  RuleFamily family = RuleFamily::Basic;

  bool operator==(const Rule&) const = default;
};

std::string to_string(const Rule& r);

struct Grammar {
  std::set<SymbolKind> nonterminals;
  std::set<SymbolKind> terminals;  // W stands for the word vocabulary; FA/FO when bi-implicit is on
  std::vector<Rule> rules;
  Symbol start = Symbol::of(SymbolKind::S);
  std::vector<std::string> categories;
  std::vector<Polarity> polarities{kPolarities.begin(), kPolarities.end()};
  std::set<RuleFamily> families;

  bool has_family(RuleFamily f) const { return families.count(f) != 0; }
  bool has_category(const std::string& c) const;
  bool operator==(const Grammar&) const = default;
};

/// Basic rules plus every rule of each enabled conditional family. Category
/// ids are normalized; duplicates or an empty list raise ConfigError.
Grammar build_grammar(const std::vector<std::string>& categories, const std::set<RuleFamily>& families);

/// All four conditional families.
std::set<RuleFamily> all_families();

/// Right-branching binarization; "S -> I Q I" becomes "S -> I S|Q.I" and
/// "S|Q.I -> Q I".
Grammar binarize(const Grammar& g);

/// Versioned text form (see docs/formats.md).
void write_grammar(std::ostream& os, const Grammar& g);
Grammar read_grammar(std::istream& is);

/// Applies the same right-branching scheme to a full-grammar tree.
OpinionTree binarize_tree(const OpinionTree& tree);

/// Removes intermediate nodes, splicing their children into the parent.
OpinionTree collapse_intermediates(const OpinionTree& tree);

/// Validity of a full (pre-pruning) tree, or of its binarized form when `g`
/// is the binarized grammar.
bool is_valid_tree(const OpinionTree& tree, const Grammar& g);

/// Post-pruning node labels. Ordering: A:<category>..., O:<polarity>...,
/// S, Q, AT, OT, EMPTY. EMPTY also stands for irrelevant-content (I) leaves
/// and binarization artifacts; it is never scored.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<Symbol> labels);

  std::size_t size() const { return labels_.size(); }
  /// Number of labels carrying a learned score (everything but EMPTY).
  std::size_t scored_size() const { return labels_.size() - 1; }
  int empty_id() const { return static_cast<int>(labels_.size()) - 1; }

  const Symbol& label_of(int id) const { return labels_.at(static_cast<std::size_t>(id)); }
  /// Throws ContractViolation for symbols outside the set.
  int index_of(const Symbol& s) const;
  /// Like index_of, but I leaves, intermediates and epsilon map to EMPTY.
  int node_label(const Symbol& s) const;
  bool contains(const Symbol& s) const { return index_.count(s) != 0; }

  const std::vector<Symbol>& labels() const { return labels_; }
  bool operator==(const LabelSet& o) const { return labels_ == o.labels_; }

 private:
  std::vector<Symbol> labels_;
  std::map<Symbol, int> index_;
};

LabelSet build_label_set(const Grammar& g);

/// Instantiated, binarized form of the pruned grammar. Every symbol maps to
/// a label id; intermediates and the I leaf map to EMPTY. Symbol ids are a
/// topological order of the unary rules (parent id > child id).
struct ChartSymbol {
  std::string name;
  int label = 0;
  bool intermediate = false;
  Symbol symbol;
};

struct UnaryRule {
  int parent;
  int child;
};

struct BinaryRule {
  int parent;
  int left;
  int right;
};

struct ChartGrammar {
  Grammar source;
  LabelSet labels;
  std::vector<ChartSymbol> symbols;
  std::vector<UnaryRule> unary;    // sorted by (parent, child)
  std::vector<BinaryRule> binary;  // sorted by (parent, left, right)
  int i_leaf = -1;
  int at_leaf = -1;
  int ot_leaf = -1;
  int start = -1;

  std::size_t symbol_count() const { return symbols.size(); }
  int find(const std::string& name) const;
};

ChartGrammar compile_chart_grammar(const Grammar& g);

/// Validity of a pruned tree: every node's (label, child labels) is derivable
/// by the chart grammar once intermediates are collapsed, children tile the
/// parent span, and the root is S.
bool is_valid_tree(const OpinionTree& tree, const ChartGrammar& g);

}  // namespace otp

#endif  // OTP_GRAMMAR_HPP
