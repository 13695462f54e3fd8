// Normalizing a sentence and its gold quadruples into an opinion tree, tree
// pruning, and the labeled-span view of a pruned tree.

#ifndef OTP_TREE_BUILDER_HPP
#define OTP_TREE_BUILDER_HPP

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "otp/grammar.hpp"
#include "otp/tree.hpp"

namespace otp {

inline constexpr const char* kFakeAspectToken = "FA";
inline constexpr const char* kFakeOpinionToken = "FO";

enum class SituationTag { Basic, OneToMany, MonoImplicit, BiImplicit, CrossMapping, Unparseable };

enum class UnparseableReason { OneToManyWithImplicit, NestedSpans, OverlappedSpans, CrossingQuads };

std::string_view to_string(SituationTag t);
std::optional<SituationTag> situation_from_string(std::string_view s);
std::string_view to_string(UnparseableReason r);

struct Situation {
  SituationTag tag = SituationTag::Basic;
  std::optional<UnparseableReason> reason;  // set iff tag == Unparseable

  bool parseable() const { return tag != SituationTag::Unparseable; }
  bool operator==(const Situation&) const = default;
};

/// Token sequence with quadruples in its coordinates. `augmented` records
/// that FA and FO were prepended as tokens 0 and 1.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<SentimentQuadruple> quads;
  bool augmented = false;
};

/// Throws ContractViolation if a span is empty or out of range.
void check_quad_spans(const std::vector<std::string>& tokens, const std::vector<SentimentQuadruple>& quads);

/// Prepends FA/FO when some quad has both terms implicit (or when `always`
/// is set), shifting spans by two and rewriting fully implicit quads onto
/// [0,1) / [1,2). Otherwise returns the input unchanged.
Sentence augment_tokens(const std::vector<std::string>& tokens, const std::vector<SentimentQuadruple>& quads,
                        bool always = false);

/// Maps quads of an augmented sentence back to raw coordinates: FA/FO spans
/// become implicit terms and other spans shift left by two.
std::vector<SentimentQuadruple> strip_augmentation(const std::vector<SentimentQuadruple>& quads, bool augmented);

/// Situation of an (augmented) sentence, or the reason it cannot be parsed.
Situation validate_parseable(const Sentence& s);

/// Full-grammar tree (before pruning). Throws ConfigError carrying the
/// validator's reason for unparseable input.
OpinionTree build_tree(const Sentence& s, const Grammar& g);

/// Integrates C/P chains into composite A/O nodes, drops epsilon chains, and
/// splices grouping nodes whose children repeat their kind.
OpinionTree prune_tree(const OpinionTree& tree);

/// build_tree followed by prune_tree.
OpinionTree build_pruned_tree(const Sentence& s, const Grammar& g);

struct LabeledSpan {
  int begin = 0;
  int end = 0;
  int label = 0;

  auto operator<=>(const LabeledSpan&) const = default;
};

/// Pre-order list of the labeled spans of a pruned tree. I leaves are not
/// recorded; a chain of labels on one span is listed top-down.
using LabeledSpanSet = std::vector<LabeledSpan>;

LabeledSpanSet tree_to_spans(const OpinionTree& tree, const LabelSet& labels);

/// Rebuilds the pruned tree over [0, n); gaps inside S and Q become I leaves.
/// The input order does not matter.
OpinionTree spans_to_tree(const LabeledSpanSet& spans, int n, const LabelSet& labels);

/// Convenience: situation counts over a corpus of (augmented) sentences.
std::map<SituationTag, std::size_t> situation_histogram(const std::vector<Sentence>& sentences);

}  // namespace otp

#endif  // OTP_TREE_BUILDER_HPP
