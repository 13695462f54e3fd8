#include "otp/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace otp {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw MalformedTree("cannot recover quadruples: " + what); }

struct TermNode {
  Span span;
  std::vector<Symbol> chain;  // top-down
};

// A:c [-> A:c'] -> AT, or the O counterpart.
TermNode read_term(const OpinionTree& t, SymbolKind kind, SymbolKind leaf) {
  TermNode out{t.span(), {}};
  const OpinionTree* cur = &t;
  while (cur->label.kind == kind) {
    if (!cur->label.has_value()) malformed("term node without a value");
    out.chain.push_back(cur->label);
    if (cur->children.size() != 1) malformed("term node must have one child");
    if (cur->children[0].span() != t.span()) malformed("term chain changes span");
    cur = &cur->children[0];
  }
  if (cur->label.kind != leaf || !cur->is_leaf() || cur->begin >= cur->end) malformed("term chain must end in a word leaf");
  return out;
}

struct Slot {
  Span span;
  Symbol value;
};

std::vector<Slot> slots_bottom_up(const TermNode& n) {
  std::vector<Slot> out;
  for (auto it = n.chain.rbegin(); it != n.chain.rend(); ++it) out.push_back({n.span, *it});
  return out;
}

SentimentQuadruple make_quad(const Slot& a, const Slot& o) {
  return {a.span, *a.value.category, o.span, *o.value.polarity};
}

void pair_group(const std::vector<TermNode>& as, const std::vector<TermNode>& os,
                std::vector<SentimentQuadruple>& out) {
  auto chain_total = [](const std::vector<TermNode>& ns) {
    std::size_t k = 0;
    for (const auto& n : ns) k += n.chain.size();
    return k;
  };
  auto all_single = [](const std::vector<TermNode>& ns) {
    return std::all_of(ns.begin(), ns.end(), [](const TermNode& n) { return n.chain.size() == 1; });
  };

  // Spread the hub chain over the other side, nearest node first.
  auto spread = [&](const TermNode& hub, std::vector<TermNode> spokes, bool hub_is_aspect) {
    std::stable_sort(spokes.begin(), spokes.end(), [&](const TermNode& x, const TermNode& y) {
      double dx = std::abs(x.span.midpoint() - hub.span.midpoint());
      double dy = std::abs(y.span.midpoint() - hub.span.midpoint());
      if (dx != dy) return dx < dy;
      return x.span.begin < y.span.begin;
    });
    std::vector<Slot> spoke_slots;
    for (const auto& s : spokes) {
      auto sl = slots_bottom_up(s);
      spoke_slots.insert(spoke_slots.end(), sl.begin(), sl.end());
    }
    auto hub_slots = slots_bottom_up(hub);
    for (std::size_t i = 0; i < hub_slots.size(); ++i) {
      out.push_back(hub_is_aspect ? make_quad(hub_slots[i], spoke_slots[i]) : make_quad(spoke_slots[i], hub_slots[i]));
    }
  };

  if (!(all_single(as) && all_single(os))) {
    if (as.size() == 1 && as[0].chain.size() > 1 && as[0].chain.size() == chain_total(os)) {
      spread(as[0], os, true);
      return;
    }
    if (os.size() == 1 && os[0].chain.size() > 1 && os[0].chain.size() == chain_total(as)) {
      spread(os[0], as, false);
      return;
    }
  }
  for (const auto& a : as) {
    for (const auto& o : os) {
      for (const auto& sa : slots_bottom_up(a)) {
        for (const auto& so : slots_bottom_up(o)) out.push_back(make_quad(sa, so));
      }
    }
  }
}

void recover_q(const OpinionTree& q, std::vector<SentimentQuadruple>& out) {
  if (q.children.size() == 1) {
    // Implicit aspect: Q -> A:c -> O:p -> OT. Implicit opinion: Q -> O:p -> A:c -> AT.
    const auto& top = q.children[0];
    if (top.children.size() != 1) malformed("unexpected single child of Q");
    const auto& mid = top.children[0];
    if (top.label.kind == SymbolKind::A && top.label.category && mid.label.kind == SymbolKind::O) {
      auto o = read_term(mid, SymbolKind::O, SymbolKind::OT);
      if (o.chain.size() != 1 || mid.span() != top.span()) malformed("implicit-aspect chain");
      out.push_back({std::nullopt, *top.label.category, o.span, *o.chain[0].polarity});
      return;
    }
    if (top.label.kind == SymbolKind::O && top.label.polarity && mid.label.kind == SymbolKind::A) {
      auto a = read_term(mid, SymbolKind::A, SymbolKind::AT);
      if (a.chain.size() != 1 || mid.span() != top.span()) malformed("implicit-opinion chain");
      out.push_back({a.span, *a.chain[0].category, std::nullopt, *top.label.polarity});
      return;
    }
    malformed("unexpected single child of Q");
  }
  std::vector<TermNode> as, os;
  for (const auto& c : q.children) {
    switch (c.label.kind) {
      case SymbolKind::I: break;
      case SymbolKind::A: as.push_back(read_term(c, SymbolKind::A, SymbolKind::AT)); break;
      case SymbolKind::O: os.push_back(read_term(c, SymbolKind::O, SymbolKind::OT)); break;
      default: malformed("unexpected child of Q: " + to_string(c.label));
    }
  }
  if (as.empty() || os.empty()) malformed("Q needs aspect and opinion nodes");
  pair_group(as, os, out);
}

std::optional<Span> unaugment(const Span& s, const Span& fake, const Span& other_fake) {
  if (s == fake) return std::nullopt;
  if (s == other_fake || s.begin < 2) malformed("fake-token leaf in the wrong role");
  return Span{s.begin - 2, s.end - 2};
}

}  // namespace

std::vector<SentimentQuadruple> recover_quads(const OpinionTree& tree, bool augmented) {
  if (tree.label.kind != SymbolKind::S) malformed("root must be S");
  std::vector<SentimentQuadruple> raw;
  for (const auto& c : tree.children) {
    if (c.label.kind == SymbolKind::I) continue;
    if (c.label.kind != SymbolKind::Q) malformed("unexpected child of S: " + to_string(c.label));
    recover_q(c, raw);
  }
  if (augmented) {
    const Span fa{0, 1}, fo{1, 2};
    for (auto& q : raw) {
      if (q.aspect) q.aspect = unaugment(*q.aspect, fa, fo);
      if (q.opinion) q.opinion = unaugment(*q.opinion, fo, fa);
    }
  }
  std::sort(raw.begin(), raw.end());
  return raw;
}

}  // namespace otp
