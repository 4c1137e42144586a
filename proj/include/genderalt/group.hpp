#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "genderalt/structure.hpp"
#include "genderalt/types.hpp"

namespace genderalt {

/// Set of (masculine phrase, feminine phrase) inflection pairs. Stored and matched
/// on lowercased token sequences.
class InflectionLexicon {
 public:
  InflectionLexicon() = default;

  /// Throws ConfigError on empty phrases, identical sides or marker tokens.
  void add(const Tokens& masculine, const Tokens& feminine);

  bool contains(const Tokens& masculine, const Tokens& feminine) const;
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::set<std::pair<Tokens, Tokens>>& pairs() const noexcept { return pairs_; }

  /// TSV: masculine phrase TAB feminine phrase, tokens space-separated. Blank lines and
  /// lines starting with '#' are skipped.
  static InflectionLexicon load(const std::filesystem::path& path);
  static InflectionLexicon parse(std::istream& in);

 private:
  std::set<std::pair<Tokens, Tokens>> pairs_;
};

/// One block of a token-level diff. A common run has a == b.
struct DiffBlock {
  bool common = false;
  Tokens a;
  Tokens b;

  bool operator==(const DiffBlock&) const = default;
};

/// LCS alignment of two token sequences into alternating common runs and diff spans.
/// Ties prefer matching as early as possible in both sequences. Diff spans with no
/// common token between them are a single block.
std::vector<DiffBlock> lcs_align(const Tokens& a, const Tokens& b);

/// Length of a longest common subsequence (no traceback).
std::size_t lcs_length(const Tokens& a, const Tokens& b);

struct Ungroupable {
  Tokens masculine;
  Tokens feminine;
};

using GroupResult = std::variant<StructuredTranslation, Ungroupable>;

/// Combine an all-masculine and an all-feminine translation into one structured
/// translation. Every differing span must be a lexicon pair, otherwise the whole
/// sentence is Ungroupable (carrying the first offending span).
GroupResult group(const PlainTranslation& y_m, const PlainTranslation& y_f, const InflectionLexicon& lex);

}  // namespace genderalt
