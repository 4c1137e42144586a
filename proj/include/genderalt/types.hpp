#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace genderalt {

using Token = std::string;
using Tokens = std::vector<Token>;

/// A marker-free target sentence (y_B, y_M, y_F and every derived alternative).
using PlainTranslation = Tokens;

enum class Gender { Masculine, Feminine };

enum class EntityLabel { Masculine, Feminine, Ambiguous };

/// Ambiguous-entity index (position in the entity list) -> chosen gender.
using GenderAssignment = std::map<std::size_t, Gender>;

// Reserved vocabulary.
inline constexpr std::string_view kBeg = "<BEG>";
inline constexpr std::string_view kMid = "<MID>";
inline constexpr std::string_view kEnd = "<END>";
inline constexpr std::string_view kTagM = "<M>";
inline constexpr std::string_view kTagF = "<F>";
inline constexpr std::string_view kFocusMarker = "|";
inline constexpr std::string_view kConcatSeparator = ";";

inline bool is_marker(std::string_view tok) { return tok == kBeg || tok == kMid || tok == kEnd; }

char gender_code(Gender g);
Gender parse_gender(std::string_view code);
char label_code(EntityLabel l);
EntityLabel parse_label(std::string_view code);

/// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRecord : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AdapterError : public Error {
 public:
  using Error::Error;
};

class MissingAssignment : public Error {
 public:
  explicit MissingAssignment(std::size_t entity)
      : Error("missing gender assignment for entity " + std::to_string(entity)), entity_(entity) {}
  std::size_t entity() const noexcept { return entity_; }

 private:
  std::size_t entity_;
};

// Token helpers shared by several modules.
Tokens split_ws(std::string_view text);
std::string join(const Tokens& toks, std::string_view sep = " ");
/// ASCII plus Latin-1 supplement lowercasing; other bytes pass through.
std::string lowercase(std::string_view s);
Tokens lowercase(const Tokens& toks);

}  // namespace genderalt
