// Small fixtures shared by the unit tests.

#ifndef OTP_TEST_SUPPORT_HPP
#define OTP_TEST_SUPPORT_HPP

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "otp/grammar.hpp"
#include "otp/tree_builder.hpp"

namespace otp::test {

inline std::vector<std::string> words(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

inline std::optional<Span> sp(int b, int e) { return Span{b, e}; }

inline SentimentQuadruple quad(std::optional<Span> a, std::string cat, std::optional<Span> o, Polarity p) {
  return {a, std::move(cat), o, p};
}

inline Grammar full_grammar() {
  return build_grammar({"RESTAURANT#GENERAL", "FOOD#QUALITY", "SERVICE#GENERAL", "LAPTOP#GENERAL", "LAPTOP#PRICE"},
                       all_families());
}

}  // namespace otp::test

namespace otp {

// Readable gtest failure output: label[begin,end] with children.
inline void PrintTo(const OpinionTree& t, std::ostream* os) {
  *os << '(' << to_string(t.label) << '[' << t.begin << ',' << t.end << ']';
  for (const auto& c : t.children) {
    *os << ' ';
    PrintTo(c, os);
  }
  *os << ')';
}

}  // namespace otp

#endif  // OTP_TEST_SUPPORT_HPP
