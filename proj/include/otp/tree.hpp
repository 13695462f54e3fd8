// Sentiment quadruples and opinion trees over token fenceposts.

#ifndef OTP_TREE_HPP
#define OTP_TREE_HPP

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otp/symbol.hpp"

namespace otp {

/// Half-open fencepost interval [begin, end).
struct Span {
  int begin = 0;
  int end = 0;

  int length() const { return end - begin; }
  double midpoint() const { return 0.5 * (begin + end); }
  bool contains(const Span& o) const { return begin <= o.begin && o.end <= end; }

  auto operator<=>(const Span&) const = default;
};

/// One (aspect, category, opinion, polarity) tuple. A missing span is an
/// implicit term.
struct SentimentQuadruple {
  std::optional<Span> aspect;
  std::string category;
  std::optional<Span> opinion;
  Polarity polarity = Polarity::Positive;

  auto operator<=>(const SentimentQuadruple&) const = default;
};

std::string to_string(const SentimentQuadruple& q);

struct OpinionTree {
  Symbol label;
  int begin = 0;
  int end = 0;
  std::vector<OpinionTree> children;

  Span span() const { return {begin, end}; }
  bool is_leaf() const { return children.empty(); }
  std::size_t node_count() const;

  bool operator==(const OpinionTree&) const = default;
};

OpinionTree make_leaf(Symbol label, int begin, int end);
OpinionTree make_node(Symbol label, std::vector<OpinionTree> children);

/// True when every internal node's children tile its span left to right.
bool children_partition(const OpinionTree& tree);

/// Bracketed form, e.g. "(S (I So) (Q (O:positive (OT happy)) ...))".
/// Leaves print their covered tokens; zero-width leaves print "(<eps>)".
/// '(' ')' and '\' inside tokens are escaped with a backslash.
std::string to_bracketed(const OpinionTree& tree, std::span<const std::string> tokens);

struct BracketedTree {
  OpinionTree tree;
  std::vector<std::string> tokens;
};

/// Inverse of to_bracketed; spans are recomputed from leaf token counts.
BracketedTree parse_bracketed(std::string_view text);

}  // namespace otp

#endif  // OTP_TREE_HPP
