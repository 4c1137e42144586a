#include "genderalt/derive.hpp"

#include <algorithm>
#include <set>

namespace genderalt {

std::vector<std::size_t> aligned_entities(const AlignmentMap& alignments) {
  std::set<std::size_t> s(alignments.by_structure.begin(), alignments.by_structure.end());
  return {s.begin(), s.end()};
}

GenderAssignment uniform_assignment(const std::vector<std::size_t>& entities, Gender g) {
  GenderAssignment out;
  for (auto e : entities) out[e] = g;
  return out;
}

PlainTranslation derive(const StructuredTranslation& ys, const AlignmentMap& alignments, const GenderAssignment& g) {
  if (alignments.by_structure.size() != ys.structure_count())
    throw InvalidRecord("alignment count does not match structure count");
  PlainTranslation out;
  std::size_t si = 0;
  for (const auto& seg : ys.segments()) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      out.push_back(*tok);
      continue;
    }
    const auto entity = alignments.by_structure[si++];
    auto it = g.find(entity);
    if (it == g.end()) throw MissingAssignment(entity);
    const auto& side = std::get<GenderStructure>(seg).side(it->second);
    out.insert(out.end(), side.begin(), side.end());
  }
  return out;
}

namespace {

std::vector<Alternative> enumerate_ordered(const StructuredTranslation& ys, const AlignmentMap& alignments,
                                           const std::vector<std::size_t>& order) {
  const auto d = order.size();
  if (d > kMaxEnumeratedEntities)
    throw ConfigError("too many aligned entities to enumerate: " + std::to_string(d) + " > " +
                      std::to_string(kMaxEnumeratedEntities));
  std::vector<Alternative> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    GenderAssignment g;
    for (std::size_t b = 0; b < d; ++b) {
      // First entity is the most significant bit; a set bit means feminine.
      const bool fem = (mask >> (d - 1 - b)) & 1U;
      g[order[b]] = fem ? Gender::Feminine : Gender::Masculine;
    }
    auto t = derive(ys, alignments, g);
    out.push_back({std::move(g), std::move(t)});
  }
  return out;
}

}  // namespace

std::vector<Alternative> enumerate_alternatives(const StructuredTranslation& ys, const AlignmentMap& alignments,
                                                const AnnotatedSource& source) {
  auto order = aligned_entities(alignments);
  for (auto e : order)
    if (e >= source.entities.size()) throw InvalidRecord("alignment refers to missing entity " + std::to_string(e));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return source.entities[a].head_index < source.entities[b].head_index;
  });
  return enumerate_ordered(ys, alignments, order);
}

std::vector<Alternative> enumerate_alternatives(const StructuredTranslation& ys, const AlignmentMap& alignments) {
  return enumerate_ordered(ys, alignments, aligned_entities(alignments));
}

namespace {

bool match_at(const PlainTranslation& cand, std::size_t pos, const Tokens& phrase) {
  if (pos + phrase.size() > cand.size()) return false;
  return std::equal(phrase.begin(), phrase.end(), cand.begin() + static_cast<std::ptrdiff_t>(pos));
}

// Depth-first over segments; a side whose tokens match may still lead to a dead end
// when one side is a prefix of the other, so both are tried.
bool search(const std::vector<StructuredTranslation::Segment>& segs, const AlignmentMap& al, std::size_t seg_i,
            std::size_t struct_i, const PlainTranslation& cand, std::size_t pos, GenderAssignment& g) {
  if (seg_i == segs.size()) return pos == cand.size();
  const auto& seg = segs[seg_i];
  if (const auto* tok = std::get_if<Token>(&seg)) {
    if (pos >= cand.size() || cand[pos] != *tok) return false;
    return search(segs, al, seg_i + 1, struct_i, cand, pos + 1, g);
  }
  const auto& s = std::get<GenderStructure>(seg);
  const auto entity = al.by_structure[struct_i];
  for (Gender side : {Gender::Masculine, Gender::Feminine}) {
    auto it = g.find(entity);
    if (it != g.end() && it->second != side) continue;
    const auto& phrase = s.side(side);
    if (!match_at(cand, pos, phrase)) continue;
    const bool fresh = it == g.end();
    if (fresh) g[entity] = side;
    if (search(segs, al, seg_i + 1, struct_i + 1, cand, pos + phrase.size(), g)) return true;
    if (fresh) g.erase(entity);
  }
  return false;
}

}  // namespace

std::optional<GenderAssignment> check_agreement(const StructuredTranslation& ys, const AlignmentMap& alignments,
                                                const PlainTranslation& candidate) {
  if (alignments.by_structure.size() != ys.structure_count())
    throw InvalidRecord("alignment count does not match structure count");
  GenderAssignment g;
  if (search(ys.segments(), alignments, 0, 0, candidate, 0, g)) return g;
  return std::nullopt;
}

}  // namespace genderalt
