#include "genderalt/group.hpp"

#include <fstream>

namespace genderalt {

void InflectionLexicon::add(const Tokens& masculine, const Tokens& feminine) {
  if (masculine.empty() || feminine.empty()) throw ConfigError("lexicon entry with an empty phrase");
  for (const auto* side : {&masculine, &feminine})
    for (const auto& t : *side)
      if (is_marker(t)) throw ConfigError("lexicon entry contains marker token '" + t + "'");
  auto m = lowercase(masculine);
  auto f = lowercase(feminine);
  if (m == f) throw ConfigError("lexicon entry with identical sides: '" + join(m) + "'");
  pairs_.emplace(std::move(m), std::move(f));
}

bool InflectionLexicon::contains(const Tokens& masculine, const Tokens& feminine) const {
  return pairs_.count({lowercase(masculine), lowercase(feminine)}) > 0;
}

InflectionLexicon InflectionLexicon::parse(std::istream& in) {
  InflectionLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ConfigError("lexicon line " + std::to_string(lineno) + ": expected 'masculine<TAB>feminine'");
    try {
      lex.add(split_ws(line.substr(0, tab)), split_ws(line.substr(tab + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("lexicon line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

InflectionLexicon InflectionLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  return parse(in);
}

namespace {

// suffix[i][j] = LCS length of a[i..] and b[j..], flattened.
std::vector<std::size_t> suffix_table(const Tokens& a, const Tokens& b) {
  const auto n = a.size(), m = b.size();
  std::vector<std::size_t> t((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return t[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
  return t;
}

}  // namespace

std::size_t lcs_length(const Tokens& a, const Tokens& b) { return suffix_table(a, b)[0]; }

std::vector<DiffBlock> lcs_align(const Tokens& a, const Tokens& b) {
  const auto n = a.size(), m = b.size();
  const auto t = suffix_table(a, b);
  auto at = [&](std::size_t i, std::size_t j) { return t[i * (m + 1) + j]; };

  std::vector<DiffBlock> out;
  auto push = [&](bool common, const Token* ta, const Token* tb) {
    if (out.empty() || out.back().common != common) out.push_back({common, {}, {}});
    if (ta) out.back().a.push_back(*ta);
    if (tb) out.back().b.push_back(*tb);
  };

  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      push(true, &a[i], &b[j]);
      ++i, ++j;
    } else if (j == m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
      push(false, &a[i], nullptr);
      ++i;
    } else {
      push(false, nullptr, &b[j]);
      ++j;
    }
  }
  return out;
}

GroupResult group(const PlainTranslation& y_m, const PlainTranslation& y_f, const InflectionLexicon& lex) {
  std::vector<StructuredTranslation::Segment> segs;
  for (auto& block : lcs_align(y_m, y_f)) {
    if (block.common) {
      segs.insert(segs.end(), block.a.begin(), block.a.end());
      continue;
    }
    if (block.a.empty() || block.b.empty() || !lex.contains(block.a, block.b))
      return Ungroupable{std::move(block.a), std::move(block.b)};
    segs.emplace_back(GenderStructure{std::move(block.a), std::move(block.b)});
  }
  return StructuredTranslation(std::move(segs));
}

}  // namespace genderalt
