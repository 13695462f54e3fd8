#include "otp/symbol.hpp"

#include <cctype>
#include <utility>

namespace otp {

namespace {

constexpr std::array<std::pair<SymbolKind, std::string_view>, 14> kKindNames = {{
    {SymbolKind::S, "S"},
    {SymbolKind::Q, "Q"},
    {SymbolKind::I, "I"},
    {SymbolKind::A, "A"},
    {SymbolKind::O, "O"},
    {SymbolKind::C, "C"},
    {SymbolKind::P, "P"},
    {SymbolKind::AT, "AT"},
    {SymbolKind::OT, "OT"},
    {SymbolKind::W, "W"},
    {SymbolKind::FA, "FA"},
    {SymbolKind::FO, "FO"},
    {SymbolKind::Intermediate, "INTERMEDIATE"},
    {SymbolKind::Empty, "<eps>"},
}};

}  // namespace

std::string_view to_string(SymbolKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<SymbolKind> kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
  }
  return "?";
}

std::optional<Polarity> polarity_from_string(std::string_view s) {
  for (Polarity p : kPolarities) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

std::string to_string(const Symbol& s) {
  if (s.kind == SymbolKind::Intermediate) return s.name;
  std::string out(to_string(s.kind));
  if (s.category) out += ":" + *s.category;
  if (s.polarity) out += ":" + std::string(to_string(*s.polarity));
  return out;
}

Symbol parse_symbol(std::string_view text) {
  if (text.find('|') != std::string_view::npos) {
    return Symbol::intermediate(std::string(text));
  }
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  auto kind = kind_from_string(head);
  if (!kind) throw FormatError("unknown symbol '" + std::string(text) + "'");
  Symbol sym = Symbol::of(*kind);
  if (colon == std::string_view::npos) return sym;

  const auto value = text.substr(colon + 1);
  if (*kind == SymbolKind::A || *kind == SymbolKind::C) {
    if (value.empty()) throw FormatError("empty category in '" + std::string(text) + "'");
    sym.category = std::string(value);
  } else if (*kind == SymbolKind::O || *kind == SymbolKind::P) {
    auto pol = polarity_from_string(value);
    if (!pol) throw FormatError("unknown polarity in '" + std::string(text) + "'");
    sym.polarity = *pol;
  } else {
    throw FormatError("symbol '" + std::string(head) + "' takes no value");
  }
  return sym;
}

std::string normalize_category(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace otp
