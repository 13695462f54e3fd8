// Exhaustive enumeration of pruned opinion trees, written directly from the
// n-ary node patterns (no chart grammar, no binarization), plus dyadic random
// score tables whose sums are exact in double precision.
//
// Trees are streamed as labeled-span lists: a pruned tree is fixed by its
// labeled spans once I leaves fill the gaps.

#ifndef OTP_ORACLE_HPP
#define OTP_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "otp/grammar.hpp"
#include "otp/scorer.hpp"
#include "otp/tree_builder.hpp"

namespace otp::oracle {

class TreeEnumerator {
 public:
  using Visit = std::function<void(const LabeledSpanSet&)>;

  TreeEnumerator(const Grammar& g, bool fake_tokens) : g_(g), labels_(build_label_set(g)), fake_(fake_tokens) {
    for (const auto& c : g.categories) aspect_values_.push_back(labels_.index_of(Symbol::aspect(c)));
    for (auto p : g.polarities) opinion_values_.push_back(labels_.index_of(Symbol::opinion(p)));
    s_ = labels_.index_of(Symbol::of(SymbolKind::S));
    q_ = labels_.index_of(Symbol::of(SymbolKind::Q));
    at_ = labels_.index_of(Symbol::of(SymbolKind::AT));
    ot_ = labels_.index_of(Symbol::of(SymbolKind::OT));
  }

  /// Calls `visit` once per pruned tree over [0, n); returns the count.
  std::size_t each(int n, const Visit& visit) {
    visit_ = &visit;
    count_ = 0;
    cur_.clear();
    if (n == 0) {
      emit();
      return count_;
    }
    with(0, n, s_, [&] {
      emit();  // S over a single I leaf
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b <= n; ++b) q_sequence(a, b, [&] { emit(); });
      }
    });
    return count_;
  }

  const LabelSet& labels() const { return labels_; }

 private:
  using K = std::function<void()>;

  void emit() {
    ++count_;
    (*visit_)(cur_);
  }

  void with(int i, int j, int label, const K& k) {
    cur_.push_back({i, j, label});
    k();
    cur_.pop_back();
  }

  bool word_ok(int leaf, int i, int j) const {
    if (!fake_ || i >= 2) return true;
    if (leaf == at_) return i == 0 && j == 1;
    if (leaf == ot_) return i == 1 && j == 2;
    return true;
  }

  // X:v -> leaf, or X:v1 -> X:v2 -> leaf with v1 before v2.
  void term(bool aspect, int i, int j, const K& k) {
    const int leaf = aspect ? at_ : ot_;
    if (!word_ok(leaf, i, j)) return;
    const auto& vals = aspect ? aspect_values_ : opinion_values_;
    for (std::size_t a = 0; a < vals.size(); ++a) {
      with(i, j, vals[a], [&] { with(i, j, leaf, k); });
      if (!g_.has_family(RuleFamily::CrossMapping)) continue;
      for (std::size_t b = a + 1; b < vals.size(); ++b) {
        with(i, j, vals[a], [&] { with(i, j, vals[b], [&] { with(i, j, leaf, k); }); });
      }
    }
  }

  // Terms of one kind tiling [i, j), optionally separated by I leaves.
  void block(bool aspect, int i, int j, const K& k) {
    term(aspect, i, j, k);
    if (!g_.has_family(RuleFamily::OneToMany)) return;
    for (int s = i + 1; s < j; ++s) {
      term(aspect, i, s, [&] {
        for (int m = s; m < j; ++m) block(aspect, m, j, k);
      });
    }
  }

  void q_node(int i, int j, const K& k) {
    with(i, j, q_, [&] {
      if (g_.has_family(RuleFamily::MonoImplicit)) {
        for (int a : aspect_values_) {
          for (int o : opinion_values_) {
            if (word_ok(ot_, i, j)) with(i, j, a, [&] { with(i, j, o, [&] { with(i, j, ot_, k); }); });
            if (word_ok(at_, i, j)) with(i, j, o, [&] { with(i, j, a, [&] { with(i, j, at_, k); }); });
          }
        }
      }
      for (bool aspect_first : {true, false}) {
        for (int s = i + 1; s < j; ++s) {
          block(aspect_first, i, s, [&] {
            for (int m = s; m < j; ++m) block(!aspect_first, m, j, k);
          });
        }
      }
    });
  }

  // Q nodes tiling [i, j) with optional I leaves between them.
  void q_sequence(int i, int j, const K& k) {
    q_node(i, j, k);
    for (int s = i + 1; s < j; ++s) {
      q_node(i, s, [&] {
        for (int m = s; m < j; ++m) q_sequence(m, j, k);
      });
    }
  }

  const Grammar& g_;
  LabelSet labels_;
  bool fake_;
  std::vector<int> aspect_values_, opinion_values_;
  int s_ = 0, q_ = 0, at_ = 0, ot_ = 0;
  const Visit* visit_ = nullptr;
  LabeledSpanSet cur_;
  std::size_t count_ = 0;
};

/// Entries k * 2^-20 with k uniform in [-2^30, 2^30].
inline SpanScoreTable dyadic_table(int n, int labels, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> u(-(std::int64_t{1} << 30), std::int64_t{1} << 30);
  SpanScoreTable t(n, labels);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int l = 0; l < labels; ++l) t.at(i, j, l) = std::ldexp(static_cast<double>(u(rng)), -20);
    }
  }
  return t;
}

/// Many tables scored at once: cell (i,j,l) holds one value per table.
class TableBank {
 public:
  TableBank(const std::vector<SpanScoreTable>& tables) : count_(tables.size()) {
    n_ = tables.front().length();
    labels_ = tables.front().labels();
    data_.assign(static_cast<std::size_t>((n_ + 1) * (n_ + 1) * (labels_ + 1)) * count_, 0.0);
    for (std::size_t t = 0; t < count_; ++t) {
      for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j <= n_; ++j) {
          for (int l = 0; l < labels_; ++l) data_[cell(i, j, l) + t] = tables[t](i, j, l);
        }
      }
    }
  }
  std::size_t size() const { return count_; }
  const double* cell_values(int i, int j, int l) const { return &data_[cell(i, j, l)]; }

 private:
  std::size_t cell(int i, int j, int l) const {
    return ((static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j)) *
                static_cast<std::size_t>(labels_ + 1) +
            static_cast<std::size_t>(l)) *
           count_;
  }
  std::size_t count_;
  int n_ = 0, labels_ = 0;
  std::vector<double> data_;
};

struct OracleBest {
  double score = -INFINITY;
  LabeledSpanSet spans;
  int ties = 0;  // other trees reaching the same score
};

/// Exhaustive max over all trees of s(T) + cost(table index, T) for every table.
template <class Cost>
std::vector<OracleBest> exhaustive_best(TreeEnumerator& e, int n, const std::vector<SpanScoreTable>& tables,
                                        Cost&& cost) {
  TableBank bank(tables);
  std::vector<OracleBest> best(tables.size());
  std::vector<double> acc(tables.size());
  e.each(n, [&](const LabeledSpanSet& spans) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& s : spans) {
      const double* v = bank.cell_values(s.begin, s.end, s.label);
      for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += v[t];
    }
    for (std::size_t t = 0; t < acc.size(); ++t) {
      const double total = acc[t] + cost(t, spans);
      if (total > best[t].score) {
        best[t].score = total;
        best[t].spans = spans;
        best[t].ties = 0;
      } else if (total == best[t].score) {
        ++best[t].ties;
      }
    }
  });
  return best;
}

/// Spans of `predicted` absent from `gold`, by linear search.
inline int oracle_hamming(const LabeledSpanSet& predicted, const LabeledSpanSet& gold) {
  int miss = 0;
  for (const auto& p : predicted) {
    bool found = false;
    for (const auto& g : gold) found = found || g == p;
    miss += !found;
  }
  return miss;
}

inline LabeledSpanSet sorted_spans(LabeledSpanSet s) {
  std::sort(s.begin(), s.end());
  return s;
}

/// Signs of the span MLP's hidden pre-activations over every span. Central
/// differences are only meaningful when this pattern is the same at both
/// probe points.
inline std::vector<bool> relu_pattern(const std::vector<int>& ids, const ScorerParams& p) {
  const auto enc = encode(ids, p);
  std::vector<bool> out;
  const int n = enc.length();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const Eigen::VectorXd z = p.w1.transpose() * span_repr(enc.h, i, j) + p.b1;
      for (Eigen::Index u = 0; u < z.size(); ++u) out.push_back(z[u] > 0.0);
    }
  }
  return out;
}

struct FdReport {
  double worst = 0.0;  // largest relative error over compared probes
  int compared = 0;
  int straddled = 0;  // probes skipped because a ReLU switched between them
};

/// Central differences of `f` at step 1e-5 against `grad`, over `probes`
/// randomly chosen parameter entries of a scorer applied to `ids`.
template <class Objective>
FdReport fd_check(const ScorerParams& p, const ScorerParams& grad, const std::vector<int>& ids, Objective&& f,
                  std::mt19937_64& rng, int probes) {
  auto probe = ScorerParams::zeros_like(p);
  std::vector<double*> entries;
  std::vector<const double*> analytic;
  probe.for_each_block([&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) entries.push_back(m.data() + i);
  });
  grad.for_each_block([&](const auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) analytic.push_back(m.data() + i);
  });
  const double h = 1e-5;
  const auto pattern = relu_pattern(ids, p);
  FdReport r;
  for (int k = 0; k < probes; ++k) {
    const std::size_t e = rng() % entries.size();
    *entries[e] = h;
    auto plus = p, minus = p;
    plus.axpy(1.0, probe);
    minus.axpy(-1.0, probe);
    *entries[e] = 0.0;
    if (relu_pattern(ids, plus) != pattern || relu_pattern(ids, minus) != pattern) {
      ++r.straddled;
      continue;
    }
    const double fd = (f(plus) - f(minus)) / (2 * h);
    r.worst = std::max(r.worst, std::abs(fd - *analytic[e]) / std::max(1e-3, std::abs(fd) + std::abs(*analytic[e])));
    ++r.compared;
  }
  return r;
}

}  // namespace otp::oracle

#endif  // OTP_ORACLE_HPP
