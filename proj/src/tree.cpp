#include "otp/tree.hpp"

#include <sstream>

namespace otp {

namespace {

std::string span_text(const std::optional<Span>& s) {
  if (!s) return "-";
  return std::to_string(s->begin) + "," + std::to_string(s->end);
}

void escape_into(std::string& out, const std::string& token) {
  for (char c : token) {
    if (c == '(' || c == ')' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
}

void write_bracketed(std::string& out, const OpinionTree& t, std::span<const std::string> tokens) {
  out.push_back('(');
  out += to_string(t.label);
  if (t.is_leaf()) {
    for (int k = t.begin; k < t.end; ++k) {
      out.push_back(' ');
      escape_into(out, tokens[static_cast<std::size_t>(k)]);
    }
  } else {
    for (const auto& c : t.children) {
      out.push_back(' ');
      write_bracketed(out, c, tokens);
    }
  }
  out.push_back(')');
}

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  BracketedTree read() {
    BracketedTree out;
    skip_space();
    out.tree = read_node(out.tokens);
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("bracketed tree: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  std::string read_atom() {
    std::string atom;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == ')') break;
      if (c == '\\') {
        if (++pos_ == text_.size()) fail("dangling escape");
        c = text_[pos_];
      }
      atom.push_back(c);
      ++pos_;
    }
    if (atom.empty()) fail("expected atom");
    return atom;
  }

  OpinionTree read_node(std::vector<std::string>& tokens) {
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    ++pos_;
    skip_space();
    OpinionTree node;
    node.label = parse_symbol(read_atom());
    node.begin = static_cast<int>(tokens.size());
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      while (pos_ < text_.size() && text_[pos_] == '(') {
        node.children.push_back(read_node(tokens));
        skip_space();
      }
    } else {
      while (pos_ < text_.size() && text_[pos_] != ')') {
        tokens.push_back(read_atom());
        skip_space();
      }
    }
    if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
    ++pos_;
    node.end = static_cast<int>(tokens.size());
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const SentimentQuadruple& q) {
  return "(" + span_text(q.aspect) + " " + q.category + " " + std::string(to_string(q.polarity)) + " " +
         span_text(q.opinion) + ")";
}

std::size_t OpinionTree::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

OpinionTree make_leaf(Symbol label, int begin, int end) {
  return OpinionTree{std::move(label), begin, end, {}};
}

OpinionTree make_node(Symbol label, std::vector<OpinionTree> children) {
  OpinionTree t{std::move(label), 0, 0, std::move(children)};
  if (!t.children.empty()) {
    t.begin = t.children.front().begin;
    t.end = t.children.back().end;
  }
  return t;
}

bool children_partition(const OpinionTree& tree) {
  if (tree.begin > tree.end) return false;
  if (tree.is_leaf()) return true;
  int cursor = tree.begin;
  for (const auto& c : tree.children) {
    if (c.begin != cursor) return false;
    if (!children_partition(c)) return false;
    cursor = c.end;
  }
  return cursor == tree.end;
}

std::string to_bracketed(const OpinionTree& tree, std::span<const std::string> tokens) {
  std::string out;
  write_bracketed(out, tree, tokens);
  return out;
}

BracketedTree parse_bracketed(std::string_view text) { return BracketReader(text).read(); }

}  // namespace otp
