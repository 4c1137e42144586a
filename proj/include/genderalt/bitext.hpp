#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "genderalt/corpus.hpp"

namespace genderalt {

/// Source tokens with "<M>"/"<F>" inserted as separate tokens after each ambiguous head.
struct TaggedSource {
  Tokens tokens;

  bool operator==(const TaggedSource&) const = default;
};

/// Throws MissingAssignment if an ambiguous entity of x is unassigned.
TaggedSource tag_source(const AnnotatedSource& x, const GenderAssignment& g);

struct BitextRow {
  GenderAssignment assignment;
  TaggedSource source;
  PlainTranslation target;
};

/// Fine-tuning pairs for one record: the all-masculine and all-feminine assignments of
/// the ambiguous entities, then up to `max_extra` non-uniform assignments drawn uniformly
/// without replacement (emitted in enumeration order). Entities are ordered by head index,
/// first entity most significant, M before F.
std::vector<BitextRow> extract_bitext(const GTransRecord& rec, std::size_t max_extra, std::uint64_t seed);

/// Seed for record `index` of a corpus run with `seed`.
std::uint64_t record_seed(std::uint64_t seed, std::size_t index);

/// "tagged source TAB target".
std::string to_tsv(const BitextRow& row);

}  // namespace genderalt
