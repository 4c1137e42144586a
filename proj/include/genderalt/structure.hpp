#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "genderalt/types.hpp"

namespace genderalt {

/// A paired (masculine, feminine) phrase whose surface form depends on one entity.
struct GenderStructure {
  Tokens masculine;
  Tokens feminine;

  const Tokens& side(Gender g) const { return g == Gender::Masculine ? masculine : feminine; }
  bool operator==(const GenderStructure&) const = default;
};

/// Interleaving of plain tokens and gender structures.
class StructuredTranslation {
 public:
  using Segment = std::variant<Token, GenderStructure>;

  StructuredTranslation() = default;
  /// Throws InvalidRecord when a segment violates the structure invariants.
  explicit StructuredTranslation(std::vector<Segment> segments);

  /// Structure-free translation.
  static StructuredTranslation plain(const Tokens& toks);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t structure_count() const noexcept { return structure_count_; }
  bool has_structures() const noexcept { return structure_count_ > 0; }
  /// Structures in order of appearance.
  std::vector<GenderStructure> structures() const;

  bool operator==(const StructuredTranslation&) const = default;

 private:
  std::vector<Segment> segments_;
  std::size_t structure_count_ = 0;
};

/// Flat decoder-side token stream: each structure becomes <BEG> M <MID> F <END>.
struct SerializedStructured {
  Tokens tokens;
  std::vector<std::size_t> mid_positions;
};

enum class MarkerError { UnbalancedMarkers, NestedMarkers, EmptySide, StrayMarker };

const char* to_string(MarkerError e);

class MarkerParseError : public Error {
 public:
  MarkerParseError(MarkerError kind, std::size_t position);
  MarkerError kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  MarkerError kind_;
  std::size_t position_;
};

SerializedStructured serialize(const StructuredTranslation& ys);

/// Inverse of serialize. Throws MarkerParseError on malformed marker layout.
StructuredTranslation parse(const Tokens& tokens);

/// (all-masculine surface, all-feminine surface).
std::pair<PlainTranslation, PlainTranslation> split(const StructuredTranslation& ys);

}  // namespace genderalt
