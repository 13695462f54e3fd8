#include "otp/decoder.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace otp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Via : std::uint8_t { None, Leaf, Unary, Binary };

struct Back {
  Via via = Via::None;
  int split = -1;
  int left = -1;  // child symbol for unary rules
  int right = -1;
};

class Chart {
 public:
  Chart(int n, std::size_t symbols)
      : n_(n), symbols_(symbols),
        best_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1) * symbols, kNegInf),
        back_(best_.size()) {}

  std::size_t at(int i, int j, int s) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j)) * symbols_ +
           static_cast<std::size_t>(s);
  }
  double& best(int i, int j, int s) { return best_[at(i, j, s)]; }
  double best(int i, int j, int s) const { return best_[at(i, j, s)]; }
  Back& back(int i, int j, int s) { return back_[at(i, j, s)]; }
  const Back& back(int i, int j, int s) const { return back_[at(i, j, s)]; }

 private:
  int n_;
  std::size_t symbols_;
  std::vector<double> best_;
  std::vector<Back> back_;
};

// Appends the subtree for symbol s over [i, j) to `out`, splicing the
// children of binarization intermediates into their parent.
void rebuild(const Chart& chart, const ChartGrammar& g, int i, int j, int s, std::vector<OpinionTree>& out) {
  const auto& sym = g.symbols[static_cast<std::size_t>(s)];
  const Back& b = chart.back(i, j, s);
  if (b.via == Via::None) throw ContractViolation("decoder backpointer missing");
  const bool spliced = sym.symbol.kind == SymbolKind::Intermediate;
  std::vector<OpinionTree>* dst = &out;
  if (!spliced) {
    out.push_back(OpinionTree{sym.symbol, i, j, {}});
    dst = &out.back().children;
  }
  if (b.via == Via::Unary) {
    rebuild(chart, g, i, j, b.left, *dst);
  } else if (b.via == Via::Binary) {
    rebuild(chart, g, i, b.split, b.left, *dst);
    rebuild(chart, g, b.split, j, b.right, *dst);
  }
}

bool leaf_allowed(const ChartGrammar& g, int s, int i, int j, const DecodeOptions& opt) {
  if (!opt.fake_tokens || i >= 2) return true;
  if (s == g.at_leaf) return i == 0 && j == 1;
  if (s == g.ot_leaf) return i == 1 && j == 2;
  return true;
}

}  // namespace

double score_tree(const OpinionTree& tree, const SpanScoreTable& table, const LabelSet& labels) {
  double total = 0.0;
  auto visit = [&](auto&& self, const OpinionTree& t) -> void {
    const int l = labels.node_label(t.label);
    if (l != labels.empty_id() && t.begin < t.end) total += table(t.begin, t.end, l);
    for (const auto& c : t.children) self(self, c);
  };
  visit(visit, tree);
  return total;
}

double score_spans(const LabeledSpanSet& spans, const SpanScoreTable& table) {
  double total = 0.0;
  for (const auto& s : spans) total += table(s.begin, s.end, s.label);
  return total;
}

DecodeResult decode(const SpanScoreTable& table, const ChartGrammar& g, const DecodeOptions& opt) {
  const int n = table.length();
  if (static_cast<std::size_t>(table.labels()) != g.labels.scored_size()) {
    throw ContractViolation("score table and grammar disagree on the label count");
  }
  if (n == 0) return {make_leaf(Symbol::of(SymbolKind::S), 0, 0), 0.0};

  const int nsym = static_cast<int>(g.symbol_count());
  Chart chart(n, g.symbols.size());

  // Binary rules grouped by parent so ties resolve by split before rule.
  std::vector<std::pair<std::size_t, std::size_t>> by_parent;
  for (std::size_t r = 0; r < g.binary.size();) {
    std::size_t e = r;
    while (e < g.binary.size() && g.binary[e].parent == g.binary[r].parent) ++e;
    by_parent.emplace_back(r, e);
    r = e;
  }
  auto label_score = [&](int s, int i, int j) { return table(i, j, g.symbols[static_cast<std::size_t>(s)].label); };

  for (int len = 1; len <= n; ++len) {
    for (int i = 0; i + len <= n; ++i) {
      const int j = i + len;
      const bool root_cell = (i == 0 && j == n);
      for (auto [rb, re] : by_parent) {
        const int parent = g.binary[rb].parent;
        if (parent == g.start && !root_cell) continue;
        double best = kNegInf;
        Back bk;
        for (int k = i + 1; k < j; ++k) {
          for (std::size_t r = rb; r < re; ++r) {
            const auto& rule = g.binary[r];
            const double l = chart.best(i, k, rule.left);
            if (l == kNegInf) continue;
            const double rr = chart.best(k, j, rule.right);
            if (rr == kNegInf) continue;
            if (l + rr > best) {
              best = l + rr;
              bk = Back{Via::Binary, k, rule.left, rule.right};
            }
          }
        }
        if (best > kNegInf) {
          chart.best(i, j, parent) = best + label_score(parent, i, j);
          chart.back(i, j, parent) = bk;
        }
      }
      for (int leaf : {g.i_leaf, g.at_leaf, g.ot_leaf}) {
        if (!leaf_allowed(g, leaf, i, j, opt)) continue;
        chart.best(i, j, leaf) = label_score(leaf, i, j);
        chart.back(i, j, leaf) = Back{Via::Leaf, -1, -1, -1};
      }
      for (const auto& u : g.unary) {
        if (u.parent == g.start && !root_cell) continue;
        const double c = chart.best(i, j, u.child);
        if (c == kNegInf) continue;
        const double cand = c + label_score(u.parent, i, j);
        if (cand > chart.best(i, j, u.parent)) {
          chart.best(i, j, u.parent) = cand;
          chart.back(i, j, u.parent) = Back{Via::Unary, -1, u.child, -1};
        }
      }
      if (opt.chart_dump) {
        for (int s = 0; s < nsym; ++s) {
          const double v = chart.best(i, j, s);
          if (v == kNegInf) continue;
          *opt.chart_dump << i << ' ' << j << ' ' << g.symbols[static_cast<std::size_t>(s)].name << ' ' << v << ' '
                          << chart.back(i, j, s).split << '\n';
        }
      }
    }
  }
  if (chart.best(0, n, g.start) == kNegInf) throw ContractViolation("chart grammar derives no tree");
  DecodeResult out;
  std::vector<OpinionTree> root;
  rebuild(chart, g, 0, n, g.start, root);
  out.tree = std::move(root.front());
  out.score = score_tree(out.tree, table, g.labels);
  return out;
}

SpanScoreTable cost_augmented(const SpanScoreTable& table, const LabeledSpanSet& gold) {
  SpanScoreTable aug = table;
  const int n = table.length();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int l = 0; l < table.labels(); ++l) aug.at(i, j, l) += 1.0;
    }
  }
  for (const auto& s : gold) {
    if (s.label < table.labels()) aug.at(s.begin, s.end, s.label) = table(s.begin, s.end, s.label);
  }
  return aug;
}

DecodeResult loss_augmented_decode(const SpanScoreTable& table, const ChartGrammar& g, const LabeledSpanSet& gold,
                                   const DecodeOptions& opt) {
  return decode(cost_augmented(table, gold), g, opt);
}

int hamming(const LabeledSpanSet& predicted, const LabeledSpanSet& gold) {
  LabeledSpanSet p = predicted, q = gold;
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  LabeledSpanSet diff;
  std::set_difference(p.begin(), p.end(), q.begin(), q.end(), std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

DecodeResult decode_unconstrained(const SpanScoreTable& table, const LabelSet& labels) {
  const int n = table.length();
  if (n == 0) return {make_leaf(Symbol::of(SymbolKind::S), 0, 0), 0.0};
  const int L = table.labels();
  std::vector<double> best(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
  std::vector<int> label(best.size(), L), split(best.size(), -1);
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i * (n + 1) + j); };
  for (int len = 1; len <= n; ++len) {
    for (int i = 0; i + len <= n; ++i) {
      const int j = i + len;
      double top = 0.0;  // EMPTY
      int arg = L;
      for (int l = 0; l < L; ++l) {
        if (table(i, j, l) > top) {
          top = table(i, j, l);
          arg = l;
        }
      }
      double inner = 0.0;
      int k_best = -1;
      for (int k = i + 1; k < j; ++k) {
        const double c = best[idx(i, k)] + best[idx(k, j)];
        if (k_best < 0 || c > inner) {
          inner = c;
          k_best = k;
        }
      }
      best[idx(i, j)] = top + inner;
      label[idx(i, j)] = arg;
      split[idx(i, j)] = k_best;
    }
  }
  auto build = [&](auto&& self, int i, int j) -> OpinionTree {
    const int l = label[idx(i, j)];
    OpinionTree t{l == L ? Symbol::of(SymbolKind::Empty) : labels.label_of(l), i, j, {}};
    const int k = split[idx(i, j)];
    if (k >= 0) {
      t.children.push_back(self(self, i, k));
      t.children.push_back(self(self, k, j));
    }
    return t;
  };
  return {build(build, 0, n), best[idx(0, n)]};
}

}  // namespace otp
