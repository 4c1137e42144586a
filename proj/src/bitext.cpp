#include "genderalt/bitext.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "genderalt/derive.hpp"

namespace genderalt {

TaggedSource tag_source(const AnnotatedSource& x, const GenderAssignment& g) {
  std::vector<std::optional<Gender>> tag_after(x.tokens.size());
  for (auto e : x.ambiguous_entities()) {
    auto it = g.find(e);
    if (it == g.end()) throw MissingAssignment(e);
    tag_after.at(x.entities[e].head_index) = it->second;
  }
  TaggedSource out;
  out.tokens.reserve(x.tokens.size() + g.size());
  for (std::size_t i = 0; i < x.tokens.size(); ++i) {
    out.tokens.push_back(x.tokens[i]);
    if (tag_after[i]) out.tokens.emplace_back(*tag_after[i] == Gender::Masculine ? kTagM : kTagF);
  }
  return out;
}

namespace {

// Unbiased draw in [0, bound) straight from the engine, so the sample set depends only on
// the seed and not on the standard library's distribution implementation.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

std::uint64_t record_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<BitextRow> extract_bitext(const GTransRecord& rec, std::size_t max_extra, std::uint64_t seed) {
  auto ents = rec.source.ambiguous_entities();
  std::stable_sort(ents.begin(), ents.end(), [&](std::size_t a, std::size_t b) {
    return rec.source.entities[a].head_index < rec.source.entities[b].head_index;
  });
  const auto d = ents.size();
  if (d >= 63) throw ConfigError("too many ambiguous entities for bitext extraction");

  auto assignment_for = [&](std::uint64_t mask) {
    GenderAssignment g;
    for (std::size_t b = 0; b < d; ++b)
      g[ents[b]] = ((mask >> (d - 1 - b)) & 1U) ? Gender::Feminine : Gender::Masculine;
    return g;
  };

  std::vector<std::uint64_t> masks{0};
  if (d > 0) {
    const std::uint64_t all_f = (std::uint64_t{1} << d) - 1;
    masks.push_back(all_f);
    // Non-uniform masks are 1 .. all_f - 1; Floyd's algorithm samples without replacement.
    const std::uint64_t pool = all_f - 1;
    const std::uint64_t want = std::min<std::uint64_t>(max_extra, pool);
    std::mt19937_64 rng(seed);
    std::set<std::uint64_t> picked;
    for (std::uint64_t j = pool - want; j < pool; ++j) {
      const std::uint64_t t = draw_below(rng, j + 1);
      picked.insert(picked.count(t + 1) ? j + 1 : t + 1);
    }
    masks.insert(masks.end(), picked.begin(), picked.end());
  }

  std::vector<BitextRow> rows;
  rows.reserve(masks.size());
  for (auto mask : masks) {
    auto g = assignment_for(mask);
    BitextRow row;
    row.source = tag_source(rec.source, g);
    row.target = derive(rec.target, rec.alignments, g);
    row.assignment = std::move(g);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_tsv(const BitextRow& row) { return join(row.source.tokens) + '\t' + join(row.target); }

}  // namespace genderalt
