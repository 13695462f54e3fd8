#include "otp/grammar.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace otp {

namespace {

Symbol k(SymbolKind kind) { return Symbol::of(kind); }

Rule rule(SymbolKind lhs, std::initializer_list<SymbolKind> rhs, RuleFamily fam) {
  Rule r{k(lhs), {}, fam};
  for (auto s : rhs) r.rhs.push_back(k(s));
  return r;
}

// Kind-level name used for binarization artifacts ("S|Q.I").
std::string bare_name(const Symbol& s) {
  if (s.kind == SymbolKind::Intermediate) return s.name;
  return std::string(to_string(s.kind));
}

std::string intermediate_name(const Symbol& lhs, const std::vector<Symbol>& rest) {
  std::string n = bare_name(lhs) + "|";
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (i) n += ".";
    n += bare_name(rest[i]);
  }
  return n;
}

bool same_rule_symbol(const Symbol& rule_sym, const Symbol& node_sym) {
  if (rule_sym.kind != node_sym.kind) return false;
  if (rule_sym.kind == SymbolKind::Intermediate) return rule_sym.name == node_sym.name;
  return true;
}

bool has_rule(const Grammar& g, const Symbol& lhs, const std::vector<Symbol>& rhs) {
  for (const auto& r : g.rules) {
    if (!same_rule_symbol(r.lhs, lhs) || r.rhs.size() != rhs.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < rhs.size() && ok; ++i) ok = same_rule_symbol(r.rhs[i], rhs[i]);
    if (ok) return true;
  }
  return false;
}

bool full_node_valid(const OpinionTree& t, const Grammar& g, bool is_root) {
  const auto kind = t.label.kind;
  if (!is_root && kind == SymbolKind::S) return false;
  if (t.begin > t.end) return false;

  // Values only where the grammar instantiates them.
  if (kind == SymbolKind::C) {
    if (!t.label.category || !g.has_category(*t.label.category) || t.label.polarity) return false;
  } else if (kind == SymbolKind::P) {
    if (!t.label.polarity || t.label.category) return false;
  } else if (t.label.has_value()) {
    return false;
  }

  if (kind == SymbolKind::Empty) return t.is_leaf() && t.begin == t.end;

  if (t.is_leaf()) {
    // Pre-terminals over words; W-internal structure is not materialized.
    if (kind != SymbolKind::AT && kind != SymbolKind::OT && kind != SymbolKind::I) return false;
    if (t.begin == t.end) return false;
    return has_rule(g, t.label, {k(SymbolKind::W)});
  }

  if (t.children.size() == 1 && t.children[0].label.kind == SymbolKind::Empty) {
    if (has_rule(g, t.label, {})) return true;
    return has_rule(g, t.label, {k(SymbolKind::W)}) && has_rule(g, k(SymbolKind::W), {});
  }

  std::vector<Symbol> rhs;
  rhs.reserve(t.children.size());
  for (const auto& c : t.children) rhs.push_back(c.label);
  if (!has_rule(g, t.label, rhs)) return false;
  for (const auto& c : t.children) {
    if (!full_node_valid(c, g, false)) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(RuleFamily f) {
  switch (f) {
    case RuleFamily::Basic: return "basic";
    case RuleFamily::OneToMany: return "one_to_many";
    case RuleFamily::MonoImplicit: return "mono_implicit";
    case RuleFamily::BiImplicit: return "bi_implicit";
    case RuleFamily::CrossMapping: return "cross_mapping";
  }
  return "?";
}

std::optional<RuleFamily> family_from_string(std::string_view s) {
  for (auto f : {RuleFamily::Basic, RuleFamily::OneToMany, RuleFamily::MonoImplicit, RuleFamily::BiImplicit,
                 RuleFamily::CrossMapping}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::string to_string(const Rule& r) {
  std::string out = to_string(r.lhs) + " ->";
  if (r.rhs.empty()) out += " <eps>";
  for (const auto& s : r.rhs) out += " " + to_string(s);
  return out;
}

bool Grammar::has_category(const std::string& c) const {
  return std::find(categories.begin(), categories.end(), c) != categories.end();
}

std::set<RuleFamily> all_families() { return {kConditionalFamilies.begin(), kConditionalFamilies.end()}; }

Grammar build_grammar(const std::vector<std::string>& categories, const std::set<RuleFamily>& families) {
  if (categories.empty()) throw ConfigError("grammar needs at least one category");
  Grammar g;
  std::set<std::string> seen;
  for (const auto& raw : categories) {
    auto c = normalize_category(raw);
    if (c.empty()) throw ConfigError("empty category id");
    if (c.find_first_of(" \t\n:()") != std::string::npos) throw ConfigError("category id '" + c + "' has reserved characters");
    if (!seen.insert(c).second) throw ConfigError("duplicate category id '" + c + "'");
    g.categories.push_back(c);
  }
  // Chains of categories are stored in ascending label order, which is this order.
  std::sort(g.categories.begin(), g.categories.end());
  g.families = families;
  g.families.erase(RuleFamily::Basic);

  using K = SymbolKind;
  g.nonterminals = {K::S, K::Q, K::I, K::A, K::O, K::C, K::P, K::AT, K::OT, K::W};
  g.terminals = {};
  if (g.has_family(RuleFamily::BiImplicit)) g.terminals = {K::FA, K::FO};

  const auto B = RuleFamily::Basic;
  g.rules = {
      rule(K::S, {K::I, K::Q, K::I}, B),
      rule(K::Q, {K::A, K::I, K::O}, B),
      rule(K::Q, {K::O, K::I, K::A}, B),
      rule(K::Q, {}, B),
      rule(K::Q, {K::Q, K::I, K::Q}, B),
      rule(K::A, {K::C}, B),
      rule(K::C, {K::AT}, B),
      rule(K::O, {K::P}, B),
      rule(K::P, {K::OT}, B),
      rule(K::AT, {K::W}, B),
      rule(K::OT, {K::W}, B),
      rule(K::I, {K::W}, B),
      rule(K::W, {K::W, K::W}, B),
      rule(K::W, {}, B),
  };
  if (g.has_family(RuleFamily::OneToMany)) {
    g.rules.push_back(rule(K::A, {K::A, K::I, K::A}, RuleFamily::OneToMany));
    g.rules.push_back(rule(K::O, {K::O, K::I, K::O}, RuleFamily::OneToMany));
  }
  if (g.has_family(RuleFamily::MonoImplicit)) {
    g.rules.push_back(rule(K::Q, {K::C}, RuleFamily::MonoImplicit));
    g.rules.push_back(rule(K::C, {K::O}, RuleFamily::MonoImplicit));
    g.rules.push_back(rule(K::Q, {K::P}, RuleFamily::MonoImplicit));
    g.rules.push_back(rule(K::P, {K::A}, RuleFamily::MonoImplicit));
  }
  // Bi-implicit adds the FA/FO terminals only; the basic rules parse them.
  if (g.has_family(RuleFamily::CrossMapping)) {
    g.rules.push_back(rule(K::C, {K::C}, RuleFamily::CrossMapping));
    g.rules.push_back(rule(K::P, {K::P}, RuleFamily::CrossMapping));
  }
  return g;
}

Grammar binarize(const Grammar& g) {
  Grammar out = g;
  out.rules.clear();
  auto add = [&](Rule r) {
    if (std::find(out.rules.begin(), out.rules.end(), r) == out.rules.end()) out.rules.push_back(std::move(r));
  };
  for (const auto& r : g.rules) {
    if (r.rhs.size() <= 2) {
      add(r);
      continue;
    }
    Symbol lhs = r.lhs;
    for (std::size_t i = 0; i + 2 < r.rhs.size(); ++i) {
      std::vector<Symbol> rest(r.rhs.begin() + static_cast<long>(i) + 1, r.rhs.end());
      Symbol inter = Symbol::intermediate(intermediate_name(r.lhs, rest));
      add(Rule{lhs, {r.rhs[i], inter}, r.family});
      lhs = inter;
    }
    add(Rule{lhs, {r.rhs[r.rhs.size() - 2], r.rhs.back()}, r.family});
  }
  return out;
}

void write_grammar(std::ostream& os, const Grammar& g) {
  os << "cfog-grammar 1\n";
  os << "families basic";
  for (auto f : g.families) os << ' ' << to_string(f);
  os << '\n';
  os << "categories " << g.categories.size() << '\n';
  for (const auto& c : g.categories) os << c << '\n';
  os << "rules " << g.rules.size() << '\n';
  for (const auto& r : g.rules) os << to_string(r) << " # " << to_string(r.family) << '\n';
}

Grammar read_grammar(std::istream& is) {
  auto next_line = [&](const char* what) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError(std::string("grammar: missing ") + what);
    return line;
  };
  if (next_line("header") != "cfog-grammar 1") throw FormatError("grammar: unsupported header");

  std::set<RuleFamily> families;
  {
    std::istringstream ss(next_line("families"));
    std::string word;
    ss >> word;
    if (word != "families") throw FormatError("grammar: expected 'families'");
    while (ss >> word) {
      auto f = family_from_string(word);
      if (!f) throw FormatError("grammar: unknown family '" + word + "'");
      if (*f != RuleFamily::Basic) families.insert(*f);
    }
  }
  std::vector<std::string> categories;
  {
    std::istringstream ss(next_line("categories"));
    std::string word;
    std::size_t n = 0;
    if (!(ss >> word >> n) || word != "categories") throw FormatError("grammar: expected 'categories <n>'");
    for (std::size_t i = 0; i < n; ++i) categories.push_back(next_line("category"));
  }
  Grammar g = build_grammar(categories, families);
  g.rules.clear();

  std::istringstream ss(next_line("rules"));
  std::string word;
  std::size_t n = 0;
  if (!(ss >> word >> n) || word != "rules") throw FormatError("grammar: expected 'rules <n>'");
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream rs(next_line("rule"));
    Rule r;
    std::string tok;
    rs >> tok;
    r.lhs = parse_symbol(tok);
    rs >> tok;
    if (tok != "->") throw FormatError("grammar: expected '->'");
    bool saw_family = false;
    while (rs >> tok) {
      if (tok == "#") {
        rs >> tok;
        auto f = family_from_string(tok);
        if (!f) throw FormatError("grammar: unknown family '" + tok + "'");
        r.family = *f;
        saw_family = true;
        break;
      }
      if (tok == "<eps>") continue;
      r.rhs.push_back(parse_symbol(tok));
    }
    if (!saw_family) throw FormatError("grammar: rule without family tag");
    g.rules.push_back(std::move(r));
  }
  return g;
}

OpinionTree binarize_tree(const OpinionTree& tree) {
  OpinionTree out{tree.label, tree.begin, tree.end, {}};
  std::vector<OpinionTree> kids;
  kids.reserve(tree.children.size());
  for (const auto& c : tree.children) kids.push_back(binarize_tree(c));
  if (kids.size() <= 2) {
    out.children = std::move(kids);
    return out;
  }
  // Build right to left: the last two children share the deepest node.
  std::vector<Symbol> suffix;
  for (const auto& c : tree.children) suffix.push_back(c.label);
  OpinionTree tail;
  {
    std::vector<Symbol> rest(suffix.end() - 2, suffix.end());
    tail = make_node(Symbol::intermediate(intermediate_name(tree.label, rest)),
                     {std::move(kids[kids.size() - 2]), std::move(kids.back())});
  }
  for (std::size_t i = kids.size() - 2; i-- > 1;) {
    std::vector<Symbol> rest(suffix.begin() + static_cast<long>(i), suffix.end());
    tail = make_node(Symbol::intermediate(intermediate_name(tree.label, rest)), {std::move(kids[i]), std::move(tail)});
  }
  out.children.push_back(std::move(kids[0]));
  out.children.push_back(std::move(tail));
  return out;
}

OpinionTree collapse_intermediates(const OpinionTree& tree) {
  OpinionTree out{tree.label, tree.begin, tree.end, {}};
  for (const auto& c : tree.children) {
    OpinionTree cc = collapse_intermediates(c);
    if (cc.label.kind == SymbolKind::Intermediate) {
      for (auto& g : cc.children) out.children.push_back(std::move(g));
    } else {
      out.children.push_back(std::move(cc));
    }
  }
  return out;
}

bool is_valid_tree(const OpinionTree& tree, const Grammar& g) {
  if (tree.label.kind != g.start.kind || tree.begin != 0) return false;
  if (!children_partition(tree)) return false;
  return full_node_valid(tree, g, true);
}

// ---------------------------------------------------------------------------

LabelSet::LabelSet(std::vector<Symbol> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<int>(i)).second) {
      throw ContractViolation("duplicate label " + to_string(labels_[i]));
    }
  }
}

int LabelSet::index_of(const Symbol& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw ContractViolation("label " + to_string(s) + " not in label set");
  return it->second;
}

int LabelSet::node_label(const Symbol& s) const {
  switch (s.kind) {
    case SymbolKind::I:
    case SymbolKind::Intermediate:
    case SymbolKind::Empty: return empty_id();
    default: return index_of(s);
  }
}

LabelSet build_label_set(const Grammar& g) {
  std::vector<Symbol> labels;
  for (const auto& c : g.categories) labels.push_back(Symbol::aspect(c));
  for (auto p : g.polarities) labels.push_back(Symbol::opinion(p));
  for (auto kind : {SymbolKind::S, SymbolKind::Q, SymbolKind::AT, SymbolKind::OT, SymbolKind::Empty}) {
    labels.push_back(Symbol::of(kind));
  }
  return LabelSet(std::move(labels));
}

int ChartGrammar::find(const std::string& name) const {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

ChartGrammar compile_chart_grammar(const Grammar& g) {
  ChartGrammar cg;
  cg.source = g;
  cg.labels = build_label_set(g);
  const int empty = cg.labels.empty_id();

  auto add = [&](std::string name, Symbol sym, bool inter) {
    int label = (inter || sym.kind == SymbolKind::I) ? empty : cg.labels.index_of(sym);
    cg.symbols.push_back(ChartSymbol{std::move(name), label, inter, std::move(sym)});
    return static_cast<int>(cg.symbols.size()) - 1;
  };
  auto unary = [&](int parent, int child) { cg.unary.push_back({parent, child}); };
  auto binary = [&](int parent, int left, int right) { cg.binary.push_back({parent, left, right}); };

  const bool cross = g.has_family(RuleFamily::CrossMapping);
  const bool mono = g.has_family(RuleFamily::MonoImplicit);
  const bool many = g.has_family(RuleFamily::OneToMany);
  const auto& cats = g.categories;
  const auto& pols = g.polarities;
  const auto ncat = cats.size();
  const auto npol = pols.size();

  cg.i_leaf = add("I", Symbol::of(SymbolKind::I), false);
  cg.at_leaf = add("AT", Symbol::of(SymbolKind::AT), false);
  cg.ot_leaf = add("OT", Symbol::of(SymbolKind::OT), false);

  // Lower nodes of a two-element category/polarity chain. A chain is stored
  // top-down in ascending label order, so A:c may only sit over A:c' (c' > c).
  std::vector<int> a_chain_from(ncat + 1, -1), o_chain_from(npol + 1, -1);
  if (cross) {
    std::vector<int> a2(ncat), o2(npol);
    for (std::size_t c = 0; c < ncat; ++c) {
      a2[c] = add("A:" + cats[c] + "/lower", Symbol::aspect(cats[c]), false);
      unary(a2[c], cg.at_leaf);
    }
    for (std::size_t p = 0; p < npol; ++p) {
      o2[p] = add("O:" + std::string(to_string(pols[p])) + "/lower", Symbol::opinion(pols[p]), false);
      unary(o2[p], cg.ot_leaf);
    }
    for (std::size_t c = ncat; c-- > 0;) {
      a_chain_from[c] = add("A|A>=" + cats[c], Symbol::intermediate("A|A>=" + cats[c]), true);
      unary(a_chain_from[c], a2[c]);
      if (a_chain_from[c + 1] >= 0) unary(a_chain_from[c], a_chain_from[c + 1]);
    }
    for (std::size_t p = npol; p-- > 0;) {
      const std::string n = "O|O>=" + std::string(to_string(pols[p]));
      o_chain_from[p] = add(n, Symbol::intermediate(n), true);
      unary(o_chain_from[p], o2[p]);
      if (o_chain_from[p + 1] >= 0) unary(o_chain_from[p], o_chain_from[p + 1]);
    }
  }

  std::vector<int> a_node(ncat), o_node(npol);
  for (std::size_t c = 0; c < ncat; ++c) {
    a_node[c] = add("A:" + cats[c], Symbol::aspect(cats[c]), false);
    unary(a_node[c], cg.at_leaf);
    if (cross && a_chain_from[c + 1] >= 0) unary(a_node[c], a_chain_from[c + 1]);
  }
  for (std::size_t p = 0; p < npol; ++p) {
    o_node[p] = add("O:" + std::string(to_string(pols[p])), Symbol::opinion(pols[p]), false);
    unary(o_node[p], cg.ot_leaf);
    if (cross && o_chain_from[p + 1] >= 0) unary(o_node[p], o_chain_from[p + 1]);
  }

  std::vector<int> implicit_aspect(ncat), implicit_opinion(npol);
  if (mono) {
    // Q -> A:c -> O:p -> OT (aspect missing) and Q -> O:p -> A:c -> AT.
    std::vector<int> o_under_a(npol), a_under_o(ncat);
    for (std::size_t p = 0; p < npol; ++p) {
      o_under_a[p] = add("O:" + std::string(to_string(pols[p])) + "/under-A", Symbol::opinion(pols[p]), false);
      unary(o_under_a[p], cg.ot_leaf);
    }
    const int any_o = add("A|O", Symbol::intermediate("A|O"), true);
    for (int id : o_under_a) unary(any_o, id);
    for (std::size_t c = 0; c < ncat; ++c) {
      implicit_aspect[c] = add("A:" + cats[c] + "/over-O", Symbol::aspect(cats[c]), false);
      unary(implicit_aspect[c], any_o);
    }
    for (std::size_t c = 0; c < ncat; ++c) {
      a_under_o[c] = add("A:" + cats[c] + "/under-O", Symbol::aspect(cats[c]), false);
      unary(a_under_o[c], cg.at_leaf);
    }
    const int any_a = add("O|A", Symbol::intermediate("O|A"), true);
    for (int id : a_under_o) unary(any_a, id);
    for (std::size_t p = 0; p < npol; ++p) {
      implicit_opinion[p] = add("O:" + std::string(to_string(pols[p])) + "/over-A", Symbol::opinion(pols[p]), false);
      unary(implicit_opinion[p], any_a);
    }
  }

  const int a_any = add("Q|A", Symbol::intermediate("Q|A"), true);
  for (int id : a_node) unary(a_any, id);
  const int o_any = add("Q|O", Symbol::intermediate("Q|O"), true);
  for (int id : o_node) unary(o_any, id);

  const int a_block = add("Q|A+", Symbol::intermediate("Q|A+"), true);
  unary(a_block, a_any);
  const int o_block = add("Q|O+", Symbol::intermediate("Q|O+"), true);
  unary(o_block, o_any);
  const int i_a_block = add("Q|I.A+", Symbol::intermediate("Q|I.A+"), true);
  binary(i_a_block, cg.i_leaf, a_block);
  const int i_o_block = add("Q|I.O+", Symbol::intermediate("Q|I.O+"), true);
  binary(i_o_block, cg.i_leaf, o_block);
  if (many) {
    binary(a_block, a_any, a_block);
    binary(a_block, a_any, i_a_block);
    binary(o_block, o_any, o_block);
    binary(o_block, o_any, i_o_block);
  }

  const int q = add("Q", Symbol::of(SymbolKind::Q), false);
  binary(q, a_block, o_block);
  binary(q, a_block, i_o_block);
  binary(q, o_block, a_block);
  binary(q, o_block, i_a_block);
  if (mono) {
    for (int id : implicit_aspect) unary(q, id);
    for (int id : implicit_opinion) unary(q, id);
  }

  const int q_seq = add("S|Q+", Symbol::intermediate("S|Q+"), true);
  unary(q_seq, q);
  const int i_q_seq = add("S|I.Q+", Symbol::intermediate("S|I.Q+"), true);
  binary(q_seq, q, q_seq);
  binary(q_seq, q, i_q_seq);
  binary(i_q_seq, cg.i_leaf, q_seq);
  const int q_seq_i = add("S|Q+.I", Symbol::intermediate("S|Q+.I"), true);
  binary(q_seq_i, q_seq, cg.i_leaf);

  cg.start = add("S", Symbol::of(SymbolKind::S), false);
  unary(cg.start, q_seq);
  unary(cg.start, cg.i_leaf);
  binary(cg.start, cg.i_leaf, q_seq);
  binary(cg.start, q_seq, cg.i_leaf);
  binary(cg.start, cg.i_leaf, q_seq_i);

  std::sort(cg.unary.begin(), cg.unary.end(),
            [](const UnaryRule& a, const UnaryRule& b) { return std::tie(a.parent, a.child) < std::tie(b.parent, b.child); });
  std::sort(cg.binary.begin(), cg.binary.end(), [](const BinaryRule& a, const BinaryRule& b) {
    return std::tie(a.parent, a.left, a.right) < std::tie(b.parent, b.left, b.right);
  });
  for (const auto& u : cg.unary) {
    if (u.parent <= u.child) throw ContractViolation("chart grammar unary rules are not topologically ordered");
  }
  return cg;
}

namespace {

using SymbolSet = std::vector<char>;

void close_intermediates(const ChartGrammar& g, SymbolSet& set) {
  for (const auto& u : g.unary) {
    if (g.symbols[static_cast<std::size_t>(u.parent)].intermediate && set[static_cast<std::size_t>(u.child)]) {
      set[static_cast<std::size_t>(u.parent)] = 1;
    }
  }
}

// Chart symbols a pruned node can be, or an all-zero set if it is invalid.
SymbolSet derivable(const OpinionTree& t, const ChartGrammar& g, bool is_root) {
  const auto n_sym = g.symbols.size();
  SymbolSet none(n_sym, 0);
  if (t.begin >= t.end) return none;
  if (!g.labels.contains(t.label) && t.label.kind != SymbolKind::I) return none;
  if (t.label.kind == SymbolKind::S && !is_root) return none;

  if (t.is_leaf()) {
    SymbolSet s(n_sym, 0);
    switch (t.label.kind) {
      case SymbolKind::I: s[static_cast<std::size_t>(g.i_leaf)] = 1; break;
      case SymbolKind::AT: s[static_cast<std::size_t>(g.at_leaf)] = 1; break;
      case SymbolKind::OT: s[static_cast<std::size_t>(g.ot_leaf)] = 1; break;
      default: return none;
    }
    return s;
  }
  if (t.label.kind == SymbolKind::I) return none;

  const std::size_t k = t.children.size();
  // cells[a * (k + 1) + b]: symbols spanning children a..b-1.
  std::vector<SymbolSet> cells((k + 1) * (k + 1), none);
  auto cell = [&](std::size_t a, std::size_t b) -> SymbolSet& { return cells[a * (k + 1) + b]; };
  for (std::size_t a = 0; a < k; ++a) {
    cell(a, a + 1) = derivable(t.children[a], g, false);
    if (std::none_of(cell(a, a + 1).begin(), cell(a, a + 1).end(), [](char c) { return c != 0; })) return none;
    close_intermediates(g, cell(a, a + 1));
  }
  for (std::size_t len = 2; len <= k; ++len) {
    for (std::size_t a = 0; a + len <= k; ++a) {
      const std::size_t b = a + len;
      auto& out = cell(a, b);
      for (const auto& r : g.binary) {
        if (!g.symbols[static_cast<std::size_t>(r.parent)].intermediate) continue;
        for (std::size_t m = a + 1; m < b; ++m) {
          if (cell(a, m)[static_cast<std::size_t>(r.left)] && cell(m, b)[static_cast<std::size_t>(r.right)]) {
            out[static_cast<std::size_t>(r.parent)] = 1;
            break;
          }
        }
      }
      close_intermediates(g, out);
    }
  }

  const int want = g.labels.index_of(t.label);
  SymbolSet result(n_sym, 0);
  const auto& whole = cell(0, k);
  for (const auto& u : g.unary) {
    const auto& ps = g.symbols[static_cast<std::size_t>(u.parent)];
    if (ps.intermediate || ps.label != want) continue;
    if (whole[static_cast<std::size_t>(u.child)]) result[static_cast<std::size_t>(u.parent)] = 1;
  }
  for (const auto& r : g.binary) {
    const auto& ps = g.symbols[static_cast<std::size_t>(r.parent)];
    if (ps.intermediate || ps.label != want) continue;
    for (std::size_t m = 1; m < k; ++m) {
      if (cell(0, m)[static_cast<std::size_t>(r.left)] && cell(m, k)[static_cast<std::size_t>(r.right)]) {
        result[static_cast<std::size_t>(r.parent)] = 1;
        break;
      }
    }
  }
  return result;
}

}  // namespace

bool is_valid_tree(const OpinionTree& tree, const ChartGrammar& g) {
  if (tree.label.kind != SymbolKind::S || tree.begin != 0) return false;
  if (!children_partition(tree)) return false;
  // The sole S-over-nothing case is the empty sentence.
  if (tree.is_leaf()) return tree.begin == tree.end;
  auto set = derivable(tree, g, true);
  return set[static_cast<std::size_t>(g.start)] != 0;
}

}  // namespace otp
