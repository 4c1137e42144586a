#include <doctest.h>

#include <cmath>
#include <limits>

#include "../common/fixtures.hpp"
#include "genderalt/derive.hpp"
#include "genderalt/lattice.hpp"

using namespace genderalt;
using namespace fixtures;

namespace {

// All paths of a lattice as choice vectors, in lexicographic order.
std::vector<std::vector<std::size_t>> all_choices(const InflectionLattice& lat) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (const auto& s : lat.sites) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& c : out)
      for (std::size_t v = 0; v < s.variants.size(); ++v) {
        next.push_back(c);
        next.back().push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

struct Best {
  std::vector<std::size_t> choice;
  double score = -std::numeric_limits<double>::infinity();
};

// Exhaustive argmax; strict improvement keeps the lexicographically first choice on ties.
Best exhaustive(const InflectionLattice& lat, const SequenceScorer& scorer) {
  Best best;
  for (const auto& c : all_choices(lat)) {
    const double s = score_continuation(scorer, {}, lat.realize(c));
    if (s > best.score) best = {c, s};
  }
  return best;
}

InflectionLattice random_lattice(std::mt19937_64& rng) {
  InflectionLattice lat;
  std::size_t paths = 1;
  const std::size_t n_sites = rng() % 6;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < n_sites; ++s) {
    for (auto gap = rng() % 3; gap > 0; --gap, ++pos) lat.base.push_back("w" + std::to_string(rng() % 4));
    std::size_t nv = 2 + rng() % 3;
    while (paths * nv > 64 && nv > 2) --nv;
    if (paths * nv > 64) break;
    paths *= nv;
    std::set<Tokens> vs;
    while (vs.size() < nv) {
      Tokens v;
      for (auto len = 1 + rng() % 2; len > 0; --len) v.push_back("v" + std::to_string(rng() % 6));
      vs.insert(v);
    }
    const auto& first = *vs.begin();
    LatticeSite site{pos, pos + first.size(), {vs.begin(), vs.end()}};
    lat.base.insert(lat.base.end(), first.begin(), first.end());
    pos += first.size();
    lat.sites.push_back(std::move(site));
  }
  for (auto tail = rng() % 3; tail > 0; --tail) lat.base.push_back("t");
  return lat;
}

InflectionLexicon doctor_lexicon() {
  InflectionLexicon lex;
  lex.add(toks("el doctor"), toks("la doctora"));
  lex.add(toks("enojado"), toks("enojada"));
  lex.add(toks("el"), toks("la"));
  return lex;
}

// Liked tokens cost nothing, everything else costs one nat.
class PreferScorer final : public SequenceScorer {
 public:
  explicit PreferScorer(std::set<std::string> liked) : liked_(std::move(liked)) {}
  double score(std::span<const Token>, const Token& next) const override { return liked_.count(next) ? 0.0 : -1.0; }

 private:
  std::set<std::string> liked_;
};

// Fixed per-token costs, independent of the prefix.
class TableScorer final : public SequenceScorer {
 public:
  explicit TableScorer(std::map<std::string, double> t) : t_(std::move(t)) {}
  double score(std::span<const Token>, const Token& next) const override {
    auto it = t_.find(next);
    return it == t_.end() ? -0.5 : it->second;
  }

 private:
  std::map<std::string, double> t_;
};

}  // namespace

TEST_CASE("two sites with two variants each") {
  const auto lat = build_lattice(toks("El doctor estaba enojado"), doctor_lexicon());
  REQUIRE(lat.sites.size() == 2);
  CHECK(lat.sites[0].variants.size() == 2);
  CHECK(lat.sites[1].variants.size() == 2);
  CHECK(lat.path_count() == 4);
  // Capitalization of the matched phrase carries over to the counterpart.
  CHECK(lat.sites[0].variants == std::vector<Tokens>{toks("El doctor"), toks("La doctora")});
}

TEST_CASE("no match gives a single path") {
  const auto lat = build_lattice(toks("Está lloviendo ."), doctor_lexicon());
  CHECK(lat.sites.empty());
  CHECK(lat.path_count() == 1);
  CHECK(lat.realize({}) == toks("Está lloviendo ."));
}

TEST_CASE("longest match wins over a shorter overlapping one") {
  InflectionLexicon lex;
  lex.add(toks("el"), toks("la"));
  lex.add(toks("el paciente"), toks("la paciente"));
  const auto lat = build_lattice(toks("con el paciente ."), lex);
  REQUIRE(lat.sites.size() == 1);
  CHECK(lat.sites[0].begin == 1);
  CHECK(lat.sites[0].end == 3);
}

TEST_CASE("feminine base is matched from the feminine side") {
  const auto lat = build_lattice(toks("La doctora estaba enojada"), doctor_lexicon());
  REQUIRE(lat.sites.size() == 2);
  CHECK(lat.sites[1].variants == std::vector<Tokens>{toks("enojada"), toks("enojado")});
}

TEST_CASE("beam picks the preferred variant at a single site") {
  const auto lat = build_lattice(toks("estaba enojado"), doctor_lexicon());
  const PreferScorer scorer({"estaba", "enojada"});
  CHECK(beam_decode(lat, scorer, 1) == toks("estaba enojada"));
}

TEST_CASE("uniform scorer ties break to the first variant sequence") {
  const auto lat = build_lattice(toks("La doctora estaba enojado con el"), doctor_lexicon());
  const auto r = beam_decode_detailed(lat, UniformScorer(), 4);
  CHECK(r.choice == std::vector<std::size_t>(lat.sites.size(), 0));
}

TEST_CASE("beam zero is rejected") {
  const auto lat = build_lattice(toks("el"), doctor_lexicon());
  CHECK_THROWS_AS(beam_decode(lat, UniformScorer(), 0), ConfigError);
}

TEST_CASE("full-width beam equals the exhaustive argmax on random lattices") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto lat = random_lattice(rng);
    REQUIRE(lat.path_count() <= 64);
    const HashScorer scorer(rng());
    const auto oracle = exhaustive(lat, scorer);
    const auto got = beam_decode_detailed(lat, scorer, 64);
    CHECK(got.choice == oracle.choice);
    CHECK(got.score == oracle.score);
    CHECK(got.translation == lat.realize(oracle.choice));
  }
}

TEST_CASE("wider beams never score worse") {
  std::mt19937_64 rng(4048);
  for (int t = 0; t < 300; ++t) {
    const auto lat = random_lattice(rng);
    const HashScorer scorer(rng());
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 1; b <= 16; ++b) {
      const auto r = beam_decode_detailed(lat, scorer, b);
      CHECK(r.score >= prev);
      prev = r.score;
      // The reported score is the score of the reported path.
      CHECK(r.score == score_continuation(scorer, {}, r.translation));
    }
  }
}

TEST_CASE("decoded output stays inside the lattice") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto lat = random_lattice(rng);
    const auto r = beam_decode_detailed(lat, HashScorer(t), 3);
    CHECK(r.translation == lat.realize(r.choice));
  }
}

TEST_CASE("make_variants with tag-following scorers reproduces the doctor/patient sides") {
  const auto lex = doctor_lexicon();
  const auto y_b = toks("El doctor estaba enojado con el paciente .");
  const PreferScorer m_scorer({"El", "doctor", "enojado", "el"});
  const PreferScorer f_scorer({"La", "doctora", "enojada", "la"});
  const auto [y_m, y_f] = make_variants(y_b, lex, m_scorer, f_scorer, 4);
  CHECK(join(y_m) == "El doctor estaba enojado con el paciente .");
  CHECK(join(y_f) == "La doctora estaba enojada con la paciente .");
  const auto g = group(y_m, y_f, lex);
  REQUIRE(std::holds_alternative<StructuredTranslation>(g));
  CHECK(std::get<StructuredTranslation>(g) == doctor_patient().target);
}

TEST_CASE("make_variants without sites returns the base twice") {
  const auto y_b = toks("Está lloviendo .");
  const auto [y_m, y_f] = make_variants(y_b, doctor_lexicon(), UniformScorer(), UniformScorer(), 4);
  CHECK(y_m == y_b);
  CHECK(y_f == y_b);
}

TEST_CASE("lexicon gender scorer follows uniform tags only") {
  const auto lex = doctor_lexicon();
  const UniformScorer base;
  const LexiconGenderScorer fem(base, lex, toks("The doctor <F> was angry"), 4.0);
  CHECK(fem.score({}, "doctora") > fem.score({}, "doctor"));
  const LexiconGenderScorer masc(base, lex, toks("The doctor <M> was angry"), 4.0);
  CHECK(masc.score({}, "doctor") > masc.score({}, "doctora"));
  const LexiconGenderScorer mixed(base, lex, toks("The doctor <M> the patient <F>"), 4.0);
  CHECK(mixed.score({}, "doctor") == mixed.score({}, "doctora"));
  CHECK(fem.score({}, "estaba") == base.score({}, "estaba"));
}

TEST_CASE("collapse leaves structure-free input alone") {
  const auto ys = StructuredTranslation::plain(toks("Está lloviendo ."));
  CHECK(collapse(ys, UniformScorer()) == toks("Está lloviendo ."));
}

TEST_CASE("collapse picks the side with the better average") {
  const StructuredTranslation ys = Y().s("El doctor", "La doctora").w("llegó");
  const TableScorer scorer({{"El", -1.0}, {"doctor", -1.0}, {"La", -2.0}, {"doctora", -2.0}});
  CHECK(collapse(ys, scorer) == toks("El doctor llegó"));
  const TableScorer flipped({{"El", -2.0}, {"doctor", -2.0}, {"La", -1.0}, {"doctora", -1.0}});
  CHECK(collapse(ys, flipped) == toks("La doctora llegó"));
}

TEST_CASE("collapse ties go masculine") {
  const StructuredTranslation ys = Y().s("el", "la");
  CHECK(collapse(ys, UniformScorer()) == toks("el"));
}

TEST_CASE("collapse output is a per-structure side selection") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto ys = random_structured(rng, 8);
    const auto out = collapse(ys, HashScorer(t));
    // Every structure independently: membership in the 2^k surface set.
    AlignmentMap per_structure;
    for (std::size_t i = 0; i < ys.structure_count(); ++i) per_structure.by_structure.push_back(i);
    if (ys.structure_count() <= 8) CHECK(check_agreement(ys, per_structure, out).has_value());
  }
}

TEST_CASE("entity-consistent collapse always agrees") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto ys = random_structured(rng, 8);
    AlignmentMap a;
    for (std::size_t i = 0; i < ys.structure_count(); ++i) a.by_structure.push_back(rng() % 2);
    const auto out = collapse_consistent(ys, a, HashScorer(t));
    CHECK(check_agreement(ys, a, out).has_value());
  }
}

TEST_CASE("n-gram counting") {
  const auto scorer = ngram_scorer({toks("a b"), toks("a b")}, 2, 0.1);
  const Tokens a{"a"};
  CHECK(scorer.score(a, "b") > scorer.score(a, "a"));
  const double unseen = scorer.score(a, "zzz");
  CHECK(std::isfinite(unseen));
}

TEST_CASE("n-gram probabilities sum to one over the vocabulary") {
  const std::vector<Tokens> corpus{toks("el doctor llegó"), toks("la doctora llegó tarde"), toks("el jefe")};
  for (std::size_t order : {1, 2, 3}) {
    const auto model = std::make_shared<const NgramModel>(corpus, order, 0.5);
    const NgramScorer scorer(model, toks("ctx <M>"));
    for (const auto& prefix : {Tokens{}, toks("el"), toks("la doctora"), toks("zzz qqq")}) {
      double total = 0.0;
      for (const auto& w : model->vocabulary()) total += std::exp(scorer.score(prefix, w));
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("n-gram configuration errors") {
  CHECK_THROWS_AS(NgramModel({toks("a")}, 0, 0.1), ConfigError);
  CHECK_THROWS_AS(NgramModel({toks("a")}, 2, 0.0), ConfigError);
  CHECK_THROWS_AS(NgramModel({}, 2, 0.1), ConfigError);
}
