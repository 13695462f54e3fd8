// Grammar-constrained CKY decoding over span score tables.

#ifndef OTP_DECODER_HPP
#define OTP_DECODER_HPP

#include <iosfwd>

#include "otp/grammar.hpp"
#include "otp/scorer.hpp"
#include "otp/tree_builder.hpp"

namespace otp {

struct DecodeOptions {
  /// Tokens 0 and 1 are FA/FO: word leaves touching them must be AT over
  /// [0,1), OT over [1,2), or I.
  bool fake_tokens = false;
  /// When set, every finite chart item is written as "i j symbol score split".
  std::ostream* chart_dump = nullptr;
};

struct DecodeResult {
  OpinionTree tree;  // pruned form, intermediates collapsed
  double score = 0.0;
};

/// Sum of table scores over the labeled nodes of a pruned tree (I leaves and
/// EMPTY contribute nothing).
double score_tree(const OpinionTree& tree, const SpanScoreTable& table, const LabelSet& labels);
double score_spans(const LabeledSpanSet& spans, const SpanScoreTable& table);

/// Highest-scoring tree the chart grammar derives. Ties go to the lowest
/// split point, then the lowest rule; an empty sentence gives a bare S.
DecodeResult decode(const SpanScoreTable& table, const ChartGrammar& g, const DecodeOptions& opt = {});

/// Table plus one for every non-EMPTY cell not in `gold`.
SpanScoreTable cost_augmented(const SpanScoreTable& table, const LabeledSpanSet& gold);

/// Most violating tree for the margin constraint; `score` is s(T) + hamming(T, gold).
DecodeResult loss_augmented_decode(const SpanScoreTable& table, const ChartGrammar& g, const LabeledSpanSet& gold,
                                   const DecodeOptions& opt = {});

/// Number of labeled spans of `predicted` that are missing from `gold`.
int hamming(const LabeledSpanSet& predicted, const LabeledSpanSet& gold);

/// Ablation: best binary bracketing with a free label per span (EMPTY
/// allowed), ignoring the grammar. Nodes are labeled with their argmax label.
DecodeResult decode_unconstrained(const SpanScoreTable& table, const LabelSet& labels);

}  // namespace otp

#endif  // OTP_DECODER_HPP
