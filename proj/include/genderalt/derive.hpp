#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "genderalt/corpus.hpp"
#include "genderalt/structure.hpp"

namespace genderalt {

/// Largest number of distinct aligned entities enumerate_alternatives accepts.
inline constexpr std::size_t kMaxEnumeratedEntities = 8;

/// Distinct entity indices referenced by the alignment, ascending.
std::vector<std::size_t> aligned_entities(const AlignmentMap& alignments);

/// Surface translation for one gender assignment. Structure i takes its masculine
/// side iff g(A[i]) is masculine; plain tokens pass through.
/// Throws MissingAssignment if an aligned entity is unassigned.
PlainTranslation derive(const StructuredTranslation& ys, const AlignmentMap& alignments,
                        const GenderAssignment& g);

struct Alternative {
  GenderAssignment assignment;
  PlainTranslation translation;
};

/// All 2^d alternatives over the d distinct aligned entities. Entities are ordered by
/// head index; the first entity is the most significant choice and M precedes F.
/// `source` supplies head indices for ordering; throws ConfigError when d > 8.
std::vector<Alternative> enumerate_alternatives(const StructuredTranslation& ys,
                                                const AlignmentMap& alignments,
                                                const AnnotatedSource& source);

/// Same, ordering entities by entity-list index.
std::vector<Alternative> enumerate_alternatives(const StructuredTranslation& ys,
                                                const AlignmentMap& alignments);

/// The assignment (restricted to aligned entities) that derives `candidate`, or
/// nullopt when no entity-consistent choice reproduces it.
std::optional<GenderAssignment> check_agreement(const StructuredTranslation& ys,
                                                const AlignmentMap& alignments,
                                                const PlainTranslation& candidate);

/// Uniform assignment over the given entities.
GenderAssignment uniform_assignment(const std::vector<std::size_t>& entities, Gender g);

}  // namespace genderalt
