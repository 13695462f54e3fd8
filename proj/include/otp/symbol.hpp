// Grammar symbols shared by the full opinion grammar, the pruned trees and
// the chart grammar.

#ifndef OTP_SYMBOL_HPP
#define OTP_SYMBOL_HPP

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace otp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedTree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

enum class SymbolKind {
  S,
  Q,
  I,
  A,
  O,
  C,
  P,
  AT,
  OT,
  W,
  FA,
  FO,
  Intermediate,
  Empty,
};

enum class Polarity { Positive, Negative, Neutral };

inline constexpr std::array<Polarity, 3> kPolarities = {
    Polarity::Positive, Polarity::Negative, Polarity::Neutral};

std::string_view to_string(SymbolKind kind);
std::optional<SymbolKind> kind_from_string(std::string_view s);
std::string_view to_string(Polarity p);
std::optional<Polarity> polarity_from_string(std::string_view s);

/// A grammar symbol. Categories ride on C (full trees) and on the composite
/// A:<category> labels of pruned trees; polarities likewise on P and
/// O:<polarity>. Intermediate symbols carry their binarization name.
struct Symbol {
  SymbolKind kind = SymbolKind::Empty;
  std::optional<std::string> category;
  std::optional<Polarity> polarity;
  std::string name;

  static Symbol of(SymbolKind k) { return Symbol{k, std::nullopt, std::nullopt, {}}; }
  static Symbol aspect(std::string cat) { return Symbol{SymbolKind::A, std::move(cat), std::nullopt, {}}; }
  static Symbol opinion(Polarity p) { return Symbol{SymbolKind::O, std::nullopt, p, {}}; }
  static Symbol category_node(std::string cat) { return Symbol{SymbolKind::C, std::move(cat), std::nullopt, {}}; }
  static Symbol polarity_node(Polarity p) { return Symbol{SymbolKind::P, std::nullopt, p, {}}; }
  static Symbol intermediate(std::string n) { return Symbol{SymbolKind::Intermediate, std::nullopt, std::nullopt, std::move(n)}; }

  bool has_value() const { return category.has_value() || polarity.has_value(); }

  auto operator<=>(const Symbol&) const = default;
  bool operator==(const Symbol&) const = default;
};

/// "S", "A:FOOD#QUALITY", "O:positive", "C:FOOD#QUALITY", "<eps>", or the
/// intermediate name.
std::string to_string(const Symbol& s);

/// Inverse of to_string. Names containing '|' parse as intermediates.
Symbol parse_symbol(std::string_view text);

/// Upper-cases a category identifier; entity and attribute stay separated by '#'.
std::string normalize_category(std::string_view raw);

}  // namespace otp

#endif  // OTP_SYMBOL_HPP
