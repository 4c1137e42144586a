#include "genderalt/types.hpp"

#include <sstream>

namespace genderalt {

char gender_code(Gender g) { return g == Gender::Masculine ? 'M' : 'F'; }

Gender parse_gender(std::string_view code) {
  if (code == "M") return Gender::Masculine;
  if (code == "F") return Gender::Feminine;
  throw InvalidRecord("unknown gender '" + std::string(code) + "' (expected M or F)");
}

char label_code(EntityLabel l) {
  switch (l) {
    case EntityLabel::Masculine:
      return 'M';
    case EntityLabel::Feminine:
      return 'F';
    case EntityLabel::Ambiguous:
      return 'A';
  }
  return '?';
}

EntityLabel parse_label(std::string_view code) {
  if (code == "M") return EntityLabel::Masculine;
  if (code == "F") return EntityLabel::Feminine;
  if (code == "A") return EntityLabel::Ambiguous;
  throw InvalidRecord("unknown entity label '" + std::string(code) + "' (expected M, F or A)");
}

Tokens split_ws(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' || text[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < text.size() && !(text[j] == ' ' || text[j] == '\t' || text[j] == '\r' || text[j] == '\n')) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const Tokens& toks, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.append(sep);
    out.append(toks[i]);
  }
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // U+00C0..U+00DE (minus U+00D7) encode as C3 80..C3 9E; lowercase is +0x20.
      auto d = static_cast<unsigned char>(out[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
      ++i;
    }
  }
  return out;
}

Tokens lowercase(const Tokens& toks) {
  Tokens out;
  out.reserve(toks.size());
  for (const auto& t : toks) out.push_back(lowercase(t));
  return out;
}

}  // namespace genderalt
