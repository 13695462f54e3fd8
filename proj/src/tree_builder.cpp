#include "otp/tree_builder.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "otp/recovery.hpp"

namespace otp {

namespace {

using K = SymbolKind;

struct GroupNode {
  bool aspect = true;
  Span span;
  std::vector<std::string> categories;  // sorted
  std::vector<Polarity> polarities;     // sorted
  std::size_t chain_length() const { return aspect ? categories.size() : polarities.size(); }
};

struct Group {
  enum class Kind { Explicit, ImplicitAspect, ImplicitOpinion } kind = Kind::Explicit;
  std::vector<GroupNode> nodes;  // text order
  Span span;
  SentimentQuadruple quad;  // the single quad of an implicit group
};

struct Plan {
  Situation situation;
  std::vector<Group> groups;  // text order
};

Situation unparseable(UnparseableReason r) { return {SituationTag::Unparseable, r}; }

bool partial_overlap(const Span& x, const Span& y) {
  return x.begin < y.end && y.begin < x.end && !x.contains(y) && !y.contains(x);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

OpinionTree gap(int b, int e) {
  if (b < e) return make_leaf(Symbol::of(K::I), b, e);
  return OpinionTree{Symbol::of(K::I), b, b, {make_leaf(Symbol::of(K::Empty), b, b)}};
}

OpinionTree term_tree(const GroupNode& n) {
  if (n.aspect) {
    OpinionTree cur = make_leaf(Symbol::of(K::AT), n.span.begin, n.span.end);
    for (auto it = n.categories.rbegin(); it != n.categories.rend(); ++it) {
      cur = make_node(Symbol::category_node(*it), {std::move(cur)});
    }
    return make_node(Symbol::of(K::A), {std::move(cur)});
  }
  OpinionTree cur = make_leaf(Symbol::of(K::OT), n.span.begin, n.span.end);
  for (auto it = n.polarities.rbegin(); it != n.polarities.rend(); ++it) {
    cur = make_node(Symbol::polarity_node(*it), {std::move(cur)});
  }
  return make_node(Symbol::of(K::O), {std::move(cur)});
}

// Left-branching X -> X I X over a run of same-kind nodes.
OpinionTree chain_left(Symbol label, std::vector<OpinionTree> items) {
  OpinionTree acc = std::move(items.front());
  for (std::size_t i = 1; i < items.size(); ++i) {
    OpinionTree g = gap(acc.end, items[i].begin);
    acc = make_node(label, {std::move(acc), std::move(g), std::move(items[i])});
  }
  return acc;
}

OpinionTree group_tree(const Group& g) {
  if (g.kind == Group::Kind::ImplicitAspect) {
    auto ot = make_leaf(Symbol::of(K::OT), g.quad.opinion->begin, g.quad.opinion->end);
    auto p = make_node(Symbol::polarity_node(g.quad.polarity), {std::move(ot)});
    auto o = make_node(Symbol::of(K::O), {std::move(p)});
    auto c = make_node(Symbol::category_node(g.quad.category), {std::move(o)});
    return make_node(Symbol::of(K::Q), {std::move(c)});
  }
  if (g.kind == Group::Kind::ImplicitOpinion) {
    auto at = make_leaf(Symbol::of(K::AT), g.quad.aspect->begin, g.quad.aspect->end);
    auto c = make_node(Symbol::category_node(g.quad.category), {std::move(at)});
    auto a = make_node(Symbol::of(K::A), {std::move(c)});
    auto p = make_node(Symbol::polarity_node(g.quad.polarity), {std::move(a)});
    return make_node(Symbol::of(K::Q), {std::move(p)});
  }
  std::vector<OpinionTree> first, second;
  const bool first_aspect = g.nodes.front().aspect;
  for (const auto& n : g.nodes) (n.aspect == first_aspect ? first : second).push_back(term_tree(n));
  auto b1 = chain_left(Symbol::of(first_aspect ? K::A : K::O), std::move(first));
  auto b2 = chain_left(Symbol::of(first_aspect ? K::O : K::A), std::move(second));
  auto g12 = gap(b1.end, b2.begin);
  return make_node(Symbol::of(K::Q), {std::move(b1), std::move(g12), std::move(b2)});
}

OpinionTree plan_tree(const Plan& plan, int n) {
  if (plan.groups.empty()) {
    return make_node(Symbol::of(K::S),
                     {gap(0, n), OpinionTree{Symbol::of(K::Q), n, n, {make_leaf(Symbol::of(K::Empty), n, n)}}, gap(n, n)});
  }
  std::vector<OpinionTree> qs;
  for (const auto& g : plan.groups) qs.push_back(group_tree(g));
  auto top = chain_left(Symbol::of(K::Q), std::move(qs));
  auto left = gap(0, top.begin);
  auto right = gap(top.end, n);
  return make_node(Symbol::of(K::S), {std::move(left), std::move(top), std::move(right)});
}

bool is_fake_aspect(const Sentence& s, const std::optional<Span>& sp) { return s.augmented && sp && *sp == Span{0, 1}; }
bool is_fake_opinion(const Sentence& s, const std::optional<Span>& sp) { return s.augmented && sp && *sp == Span{1, 2}; }

Plan make_plan(const Sentence& s) {
  check_quad_spans(s.tokens, s.quads);
  Plan plan;
  const auto& quads = s.quads;

  // Term spans and their roles.
  std::map<Span, std::pair<bool, bool>> roles;  // span -> (used as aspect, used as opinion)
  for (const auto& q : quads) {
    if (q.aspect) roles[*q.aspect].first = true;
    if (q.opinion) roles[*q.opinion].second = true;
  }
  bool nested = false;
  for (auto it = roles.begin(); it != roles.end(); ++it) {
    if (it->second.first && it->second.second) nested = true;
    for (auto jt = std::next(it); jt != roles.end(); ++jt) {
      if (partial_overlap(it->first, jt->first)) {
        plan.situation = unparseable(UnparseableReason::OverlappedSpans);
        return plan;
      }
      if (it->first.contains(jt->first) || jt->first.contains(it->first)) nested = true;
    }
  }
  if (nested) {
    plan.situation = unparseable(UnparseableReason::NestedSpans);
    return plan;
  }

  // Groups: quads connected through a shared aspect or opinion span.
  std::vector<std::size_t> parent(quads.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < quads.size(); ++i) {
    for (std::size_t j = i + 1; j < quads.size(); ++j) {
      bool linked = (quads[i].aspect && quads[i].aspect == quads[j].aspect) ||
                    (quads[i].opinion && quads[i].opinion == quads[j].opinion);
      if (linked) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < quads.size(); ++i) members[find_root(parent, i)].push_back(i);

  bool any_bi = false, any_mono = false, any_many = false, any_cross = false;
  for (const auto& [root, idx] : members) {
    Group g;
    const auto& q0 = quads[idx.front()];
    bool has_implicit = false;
    for (auto i : idx) {
      const auto& q = quads[i];
      bool fake = is_fake_aspect(s, q.aspect) || is_fake_opinion(s, q.opinion);
      if (!q.aspect || !q.opinion || fake) has_implicit = true;
      if (fake) any_bi = true;
      if (!q.aspect || !q.opinion) any_mono = true;
    }
    if (idx.size() > 1) {
      if (has_implicit) {
        plan.situation = unparseable(UnparseableReason::OneToManyWithImplicit);
        return plan;
      }
      any_many = true;
    }
    if (!q0.aspect && !q0.opinion) {
      // Fully implicit quads only parse through the fake tokens.
      plan.situation = unparseable(UnparseableReason::CrossingQuads);
      return plan;
    }
    if (!q0.aspect) {
      g.kind = Group::Kind::ImplicitAspect;
      g.quad = q0;
      g.span = *q0.opinion;
    } else if (!q0.opinion) {
      g.kind = Group::Kind::ImplicitOpinion;
      g.quad = q0;
      g.span = *q0.aspect;
    } else {
      std::map<Span, std::set<std::string>> cats;
      std::map<Span, std::set<Polarity>> pols;
      for (auto i : idx) {
        cats[*quads[i].aspect].insert(quads[i].category);
        pols[*quads[i].opinion].insert(quads[i].polarity);
      }
      for (const auto& [sp, cs] : cats) {
        GroupNode n{true, sp, {cs.begin(), cs.end()}, {}};
        g.nodes.push_back(std::move(n));
      }
      for (const auto& [sp, ps] : pols) {
        GroupNode n{false, sp, {}, {ps.begin(), ps.end()}};
        g.nodes.push_back(std::move(n));
      }
      std::sort(g.nodes.begin(), g.nodes.end(),
                [](const GroupNode& x, const GroupNode& y) { return x.span < y.span; });
      std::size_t switches = 0;
      for (std::size_t i = 1; i < g.nodes.size(); ++i) switches += g.nodes[i].aspect != g.nodes[i - 1].aspect;
      bool too_long = std::any_of(g.nodes.begin(), g.nodes.end(), [](const GroupNode& n) { return n.chain_length() > 2; });
      if (switches != 1 || too_long) {
        plan.situation = unparseable(UnparseableReason::CrossingQuads);
        return plan;
      }
      for (const auto& n : g.nodes) any_cross = any_cross || n.chain_length() == 2;
      g.span = {g.nodes.front().span.begin, g.nodes.back().span.end};
    }
    plan.groups.push_back(std::move(g));
  }
  std::sort(plan.groups.begin(), plan.groups.end(), [](const Group& x, const Group& y) { return x.span < y.span; });
  for (std::size_t i = 1; i < plan.groups.size(); ++i) {
    if (plan.groups[i].span.begin < plan.groups[i - 1].span.end) {
      plan.situation = unparseable(UnparseableReason::CrossingQuads);
      return plan;
    }
  }

  // The tree must give back exactly the gold quadruples.
  auto recovered = recover_quads(prune_tree(plan_tree(plan, static_cast<int>(s.tokens.size()))), s.augmented);
  auto gold = strip_augmentation(quads, s.augmented);
  std::sort(gold.begin(), gold.end());
  if (recovered != gold) {
    plan.situation = unparseable(UnparseableReason::CrossingQuads);
    return plan;
  }

  if (any_cross) plan.situation.tag = SituationTag::CrossMapping;
  else if (any_bi) plan.situation.tag = SituationTag::BiImplicit;
  else if (any_mono) plan.situation.tag = SituationTag::MonoImplicit;
  else if (any_many) plan.situation.tag = SituationTag::OneToMany;
  else plan.situation.tag = SituationTag::Basic;
  return plan;
}

RuleFamily family_for(SituationTag t) {
  switch (t) {
    case SituationTag::OneToMany: return RuleFamily::OneToMany;
    case SituationTag::MonoImplicit: return RuleFamily::MonoImplicit;
    case SituationTag::BiImplicit: return RuleFamily::BiImplicit;
    case SituationTag::CrossMapping: return RuleFamily::CrossMapping;
    default: return RuleFamily::Basic;
  }
}

void integrate_chains(OpinionTree& t) {
  auto absorb = [&](K grouping, K value_kind) {
    if (t.label.kind == grouping && !t.label.has_value() && t.children.size() == 1 &&
        t.children[0].label.kind == value_kind) {
      OpinionTree child = std::move(t.children[0]);
      t.label = grouping == K::A ? Symbol::aspect(*child.label.category) : Symbol::opinion(*child.label.polarity);
      t.children = std::move(child.children);
    }
  };
  absorb(K::A, K::C);
  absorb(K::O, K::P);
  if (t.label.kind == K::C) t.label = Symbol::aspect(*t.label.category);
  if (t.label.kind == K::P) t.label = Symbol::opinion(*t.label.polarity);
  for (auto& c : t.children) integrate_chains(c);
}

void drop_epsilon(OpinionTree& t) {
  std::erase_if(t.children, [](const OpinionTree& c) { return c.begin == c.end; });
  for (auto& c : t.children) drop_epsilon(c);
}

void splice_grouping(OpinionTree& t) {
  for (auto& c : t.children) splice_grouping(c);
  std::vector<OpinionTree> out;
  for (auto& c : t.children) {
    const auto k = c.label.kind;
    bool grouping = (k == K::A || k == K::O || k == K::Q) && !c.label.has_value() && !c.is_leaf();
    bool repeats = grouping && std::any_of(c.children.begin(), c.children.end(),
                                           [&](const OpinionTree& g) { return g.label.kind == k; });
    if (repeats) {
      for (auto& g : c.children) out.push_back(std::move(g));
    } else {
      out.push_back(std::move(c));
    }
  }
  t.children = std::move(out);
}

// Position of a label inside a same-span chain, top first.
int chain_rank(const Symbol& s, K chain_leaf) {
  switch (s.kind) {
    case K::S: return 0;
    case K::Q: return 1;
    case K::A: return chain_leaf == K::AT ? 3 : 2;
    case K::O: return chain_leaf == K::AT ? 2 : 3;
    case K::AT:
    case K::OT: return 4;
    default: return 5;
  }
}

void fill_gaps(OpinionTree& t) {
  for (auto& c : t.children) fill_gaps(c);
  if (t.label.kind != K::S && t.label.kind != K::Q) return;
  std::vector<OpinionTree> out;
  int cursor = t.begin;
  for (auto& c : t.children) {
    if (c.begin > cursor) out.push_back(make_leaf(Symbol::of(K::I), cursor, c.begin));
    cursor = c.end;
    out.push_back(std::move(c));
  }
  if (cursor < t.end) out.push_back(make_leaf(Symbol::of(K::I), cursor, t.end));
  t.children = std::move(out);
}

}  // namespace

std::string_view to_string(SituationTag t) {
  switch (t) {
    case SituationTag::Basic: return "basic";
    case SituationTag::OneToMany: return "one_to_many";
    case SituationTag::MonoImplicit: return "mono_implicit";
    case SituationTag::BiImplicit: return "bi_implicit";
    case SituationTag::CrossMapping: return "cross_mapping";
    case SituationTag::Unparseable: return "unparseable";
  }
  return "?";
}

std::optional<SituationTag> situation_from_string(std::string_view s) {
  for (auto t : {SituationTag::Basic, SituationTag::OneToMany, SituationTag::MonoImplicit, SituationTag::BiImplicit,
                 SituationTag::CrossMapping, SituationTag::Unparseable}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(UnparseableReason r) {
  switch (r) {
    case UnparseableReason::OneToManyWithImplicit: return "one_to_many_with_implicit";
    case UnparseableReason::NestedSpans: return "nested_spans";
    case UnparseableReason::OverlappedSpans: return "overlapped_spans";
    case UnparseableReason::CrossingQuads: return "crossing_quads";
  }
  return "?";
}

void check_quad_spans(const std::vector<std::string>& tokens, const std::vector<SentimentQuadruple>& quads) {
  const int n = static_cast<int>(tokens.size());
  auto check = [&](const std::optional<Span>& sp) {
    if (!sp) return;
    if (sp->begin < 0 || sp->begin >= sp->end || sp->end > n) {
      throw ContractViolation("span [" + std::to_string(sp->begin) + "," + std::to_string(sp->end) +
                              ") is empty or outside a sentence of " + std::to_string(n) + " tokens");
    }
  };
  for (const auto& q : quads) {
    check(q.aspect);
    check(q.opinion);
  }
}

Sentence augment_tokens(const std::vector<std::string>& tokens, const std::vector<SentimentQuadruple>& quads,
                        bool always) {
  bool needed = std::any_of(quads.begin(), quads.end(), [](const auto& q) { return !q.aspect && !q.opinion; });
  if (!needed && !always) return Sentence{tokens, quads, false};
  Sentence s;
  s.augmented = true;
  s.tokens = {kFakeAspectToken, kFakeOpinionToken};
  s.tokens.insert(s.tokens.end(), tokens.begin(), tokens.end());
  for (auto q : quads) {
    if (!q.aspect && !q.opinion) {
      q.aspect = Span{0, 1};
      q.opinion = Span{1, 2};
    } else {
      if (q.aspect) q.aspect = Span{q.aspect->begin + 2, q.aspect->end + 2};
      if (q.opinion) q.opinion = Span{q.opinion->begin + 2, q.opinion->end + 2};
    }
    s.quads.push_back(q);
  }
  return s;
}

std::vector<SentimentQuadruple> strip_augmentation(const std::vector<SentimentQuadruple>& quads, bool augmented) {
  if (!augmented) return quads;
  std::vector<SentimentQuadruple> out;
  out.reserve(quads.size());
  for (auto q : quads) {
    if (q.aspect) q.aspect = *q.aspect == Span{0, 1} ? std::nullopt : std::optional<Span>{Span{q.aspect->begin - 2, q.aspect->end - 2}};
    if (q.opinion) q.opinion = *q.opinion == Span{1, 2} ? std::nullopt : std::optional<Span>{Span{q.opinion->begin - 2, q.opinion->end - 2}};
    out.push_back(q);
  }
  return out;
}

Situation validate_parseable(const Sentence& s) { return make_plan(s).situation; }

OpinionTree build_tree(const Sentence& s, const Grammar& g) {
  Plan plan = make_plan(s);
  if (!plan.situation.parseable()) {
    throw ConfigError("sentence is not parseable: " + std::string(to_string(*plan.situation.reason)));
  }
  for (const auto& q : s.quads) {
    if (!g.has_category(q.category)) throw ConfigError("category '" + q.category + "' is not in the grammar");
  }
  // Every construct in use must be licensed by an enabled family.
  auto tag = plan.situation.tag;
  auto need = [&](bool cond, RuleFamily f) {
    if (cond && !g.has_family(f)) throw ConfigError("sentence needs the " + std::string(to_string(f)) + " rules");
  };
  need(tag != SituationTag::Basic, family_for(tag));
  for (const auto& grp : plan.groups) {
    need(grp.kind != Group::Kind::Explicit, RuleFamily::MonoImplicit);
    std::size_t na = 0, no = 0;
    for (const auto& n : grp.nodes) (n.aspect ? na : no)++;
    need(na > 1 || no > 1, RuleFamily::OneToMany);
  }
  bool fake = std::any_of(s.quads.begin(), s.quads.end(),
                          [&](const auto& q) { return is_fake_aspect(s, q.aspect) || is_fake_opinion(s, q.opinion); });
  need(fake, RuleFamily::BiImplicit);
  return plan_tree(plan, static_cast<int>(s.tokens.size()));
}

OpinionTree prune_tree(const OpinionTree& tree) {
  OpinionTree t = tree;
  integrate_chains(t);
  drop_epsilon(t);
  splice_grouping(t);
  return t;
}

OpinionTree build_pruned_tree(const Sentence& s, const Grammar& g) { return prune_tree(build_tree(s, g)); }

LabeledSpanSet tree_to_spans(const OpinionTree& tree, const LabelSet& labels) {
  LabeledSpanSet out;
  auto visit = [&](auto&& self, const OpinionTree& t) -> void {
    const int id = labels.node_label(t.label);
    if (id != labels.empty_id() && t.begin < t.end) out.push_back({t.begin, t.end, id});
    for (const auto& c : t.children) self(self, c);
  };
  visit(visit, tree);
  return out;
}

OpinionTree spans_to_tree(const LabeledSpanSet& spans, int n, const LabelSet& labels) {
  if (n == 0) {
    if (!spans.empty()) throw MalformedTree("labeled spans over an empty sentence");
    return make_leaf(Symbol::of(K::S), 0, 0);
  }
  // Leaf kind of each same-span chain decides the order of A and O in it.
  std::map<std::pair<int, int>, K> chain_leaf;
  for (const auto& s : spans) {
    auto k = labels.label_of(s.label).kind;
    if (k == K::AT || k == K::OT) chain_leaf[{s.begin, s.end}] = k;
  }
  std::vector<LabeledSpan> sorted = spans;
  auto rank = [&](const LabeledSpan& s) {
    auto it = chain_leaf.find({s.begin, s.end});
    return chain_rank(labels.label_of(s.label), it == chain_leaf.end() ? K::AT : it->second);
  };
  std::sort(sorted.begin(), sorted.end(), [&](const LabeledSpan& x, const LabeledSpan& y) {
    if (x.begin != y.begin) return x.begin < y.begin;
    if (x.end != y.end) return x.end > y.end;
    int rx = rank(x), ry = rank(y);
    if (rx != ry) return rx < ry;
    return x.label < y.label;
  });
  if (sorted.empty() || sorted.front().begin != 0 || sorted.front().end != n ||
      labels.label_of(sorted.front().label).kind != K::S) {
    OpinionTree root = make_leaf(Symbol::of(K::S), 0, n);
    if (!sorted.empty()) throw MalformedTree("labeled spans lack the root S over the sentence");
    root.children.push_back(make_leaf(Symbol::of(K::I), 0, n));
    return root;
  }

  OpinionTree root = make_leaf(labels.label_of(sorted.front().label), 0, n);
  std::vector<OpinionTree*> stack{&root};
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& s = sorted[i];
    while (!stack.empty() && !(stack.back()->begin <= s.begin && s.end <= stack.back()->end)) stack.pop_back();
    if (stack.empty()) throw MalformedTree("labeled span outside the root");
    auto& kids = stack.back()->children;
    if (!kids.empty() && kids.back().end > s.begin) throw MalformedTree("crossing labeled spans");
    kids.push_back(make_leaf(labels.label_of(s.label), s.begin, s.end));
    stack.push_back(&kids.back());
  }
  fill_gaps(root);
  return root;
}

std::map<SituationTag, std::size_t> situation_histogram(const std::vector<Sentence>& sentences) {
  std::map<SituationTag, std::size_t> h;
  for (const auto& s : sentences) ++h[validate_parseable(s).tag];
  return h;
}

}  // namespace otp
