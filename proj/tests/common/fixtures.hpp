#pragma once

// Records and generators shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "genderalt/corpus.hpp"
#include "genderalt/group.hpp"
#include "genderalt/lattice.hpp"
#include "genderalt/structure.hpp"
#include "genderalt/types.hpp"

#ifndef GENDERALT_DATA_DIR
#error "GENDERALT_DATA_DIR must point at the data/ directory"
#endif

namespace fixtures {

using namespace genderalt;

inline std::string data_path(const std::string& name) { return std::string(GENDERALT_DATA_DIR) + "/" + name; }

inline Tokens toks(const std::string& s) { return split_ws(s); }

inline GenderStructure gs(const std::string& m, const std::string& f) { return {toks(m), toks(f)}; }

/// Builds a StructuredTranslation from plain words and structures in order.
class Y {
 public:
  Y& w(const std::string& words) {
    for (auto& t : toks(words)) segs_.emplace_back(t);
    return *this;
  }
  Y& s(const std::string& m, const std::string& f) {
    segs_.emplace_back(gs(m, f));
    return *this;
  }
  StructuredTranslation build() const { return StructuredTranslation(segs_); }
  operator StructuredTranslation() const { return build(); }

 private:
  std::vector<StructuredTranslation::Segment> segs_;
};

inline AnnotatedSource ambiguous_source(const std::string& src, std::vector<std::size_t> heads) {
  AnnotatedSource out{toks(src), {}};
  for (auto h : heads) out.entities.push_back({h, EntityLabel::Ambiguous});
  return out;
}

/// "The secretary was angry with the boss ." with secretary aligned to two structures.
inline GTransRecord secretary_boss() {
  return {ambiguous_source("The secretary was angry with the boss .", {1, 6}),
          Y().s("El secretario", "La secretaria").w("estaba").s("enojado", "enojada").w("con").s("el jefe", "la jefa").w("."),
          {{0, 0, 1}}};
}

inline GTransRecord doctor_patient() {
  return {ambiguous_source("The doctor was angry with the patient .", {1, 6}),
          Y().s("El doctor", "La doctora").w("estaba").s("enojado", "enojada").w("con").s("el", "la").w("paciente ."),
          {{0, 0, 1}}};
}

/// Lawyer (masculine via "his"), child and judge ambiguous.
inline GTransRecord lawyer_child_judge() {
  AnnotatedSource src{toks("The lawyer fought to keep his child , who is a gangster , safe from the judge ."),
                      {{1, EntityLabel::Masculine}, {6, EntityLabel::Ambiguous}, {16, EntityLabel::Ambiguous}}};
  return {src,
          Y().w("El abogado luchó para mantener a su").s("hijo", "hija").w(", que es").s("un", "una")
              .w("gángster , a salvo").s("del juez", "de la jueza").w("."),
          {{1, 1, 2}}};
}

inline std::vector<std::string> secretary_boss_sentences() {
  return {"El secretario estaba enojado con el jefe .", "El secretario estaba enojado con la jefa .",
          "La secretaria estaba enojada con el jefe .", "La secretaria estaba enojada con la jefa ."};
}

/// Random structured translation over a small vocabulary. Structures have non-empty,
/// differing sides; plain tokens never collide with markers.
inline StructuredTranslation random_structured(std::mt19937_64& rng, std::size_t max_len = 10) {
  static const std::vector<std::string> words{"a", "b", "c", "casa", "rojo", "roja", "el", "la", ".", ",", "x", "y"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::bernoulli_distribution is_struct(0.3);
  std::uniform_int_distribution<std::size_t> side_len(1, 3);
  std::vector<StructuredTranslation::Segment> segs;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_struct(rng)) {
      GenderStructure s;
      do {
        s.masculine.clear();
        s.feminine.clear();
        for (auto k = side_len(rng); k > 0; --k) s.masculine.push_back(words[pick(rng)]);
        for (auto k = side_len(rng); k > 0; --k) s.feminine.push_back(words[pick(rng)]);
      } while (s.masculine == s.feminine);
      segs.emplace_back(std::move(s));
    } else {
      segs.emplace_back(words[pick(rng)]);
    }
  }
  return StructuredTranslation(std::move(segs));
}

/// Lexicon-consistent (y_M, y_F) pairs: plain words are drawn from a pool disjoint from
/// the lexicon phrases, structures are separated by at least one plain word, so grouping
/// has exactly one correct answer.
struct LexiconPairs {
  InflectionLexicon lex;
  std::vector<std::pair<Tokens, Tokens>> pairs;

  LexiconPairs() {
    for (auto [m, f] : std::vector<std::pair<const char*, const char*>>{
             {"el doctor", "la doctora"}, {"enojado", "enojada"}, {"el", "la"}, {"del juez", "de la jueza"},
             {"un", "una"}, {"hijo", "hija"}, {"al jefe", "a la jefa"}, {"cansado", "cansada"}})
      pairs.emplace_back(toks(m), toks(f));
    for (auto& [m, f] : pairs) lex.add(m, f);
  }
};

inline StructuredTranslation random_lexicon_structured(std::mt19937_64& rng, const LexiconPairs& lp) {
  static const std::vector<std::string> plain{"estaba", "con", "paciente", "que", "es", "muy", "hoy", ".", ","};
  std::uniform_int_distribution<std::size_t> len(1, 8);
  std::uniform_int_distribution<std::size_t> pick(0, plain.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_pair(0, lp.pairs.size() - 1);
  std::bernoulli_distribution is_struct(0.4);
  std::vector<StructuredTranslation::Segment> segs;
  bool last_struct = false;
  for (auto n = len(rng); n > 0; --n) {
    if (!last_struct && is_struct(rng)) {
      const auto& [m, f] = lp.pairs[pick_pair(rng)];
      segs.emplace_back(GenderStructure{m, f});
      last_struct = true;
    } else {
      segs.emplace_back(plain[pick(rng)]);
      last_struct = false;
    }
  }
  return StructuredTranslation(std::move(segs));
}

/// Scorer whose log-probability is a pseudo-random function of the whole prefix and the
/// next token, so beam pruning genuinely matters.
class HashScorer final : public SequenceScorer {
 public:
  explicit HashScorer(std::uint64_t salt) : salt_(salt) {}
  double score(std::span<const Token> prefix, const Token& next) const override {
    std::uint64_t h = salt_ ^ 0x9E3779B97F4A7C15ULL;
    auto mix = [&h](const std::string& s) {
      for (unsigned char c : s) h = (h ^ c) * 0x100000001B3ULL;
      h = (h ^ 0xFF) * 0x100000001B3ULL;
    };
    for (const auto& t : prefix) mix(t);
    mix(next);
    h ^= h >> 29;
    return -static_cast<double>(h % 10007) / 1000.0;
  }

 private:
  std::uint64_t salt_;
};

/// Scores every token the same.
class UniformScorer final : public SequenceScorer {
 public:
  double score(std::span<const Token>, const Token&) const override { return -1.0; }
};

}  // namespace fixtures
