// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "../common/fixtures.hpp"
#include "genderalt/align.hpp"
#include "genderalt/bitext.hpp"
#include "genderalt/derive.hpp"
#include "genderalt/kernels.hpp"
#include "genderalt/metrics.hpp"
#include "genderalt/pipeline.hpp"

using namespace genderalt;
using namespace fixtures;

namespace {

struct Check {
  std::string name;
  double limit_s;  // 0 means no runtime limit
  std::function<std::string()> body;  // empty string on success, else the first failure
};

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) return std::string("expected: ") + #cond;        \
  } while (0)

std::string serialization() {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto ys = random_structured(rng, 12);
    EXPECT(parse(serialize(ys).tokens) == ys);
  }
  auto kind_of = [](const std::string& s) -> std::optional<MarkerError> {
    try {
      parse(toks(s));
    } catch (const MarkerParseError& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  EXPECT(kind_of("a <BEG> b <MID> c") == MarkerError::UnbalancedMarkers);
  EXPECT(kind_of("<BEG> a <BEG> b <MID> c <END> <MID> d <END>") == MarkerError::NestedMarkers);
  EXPECT(kind_of("<BEG> <MID> la <END>") == MarkerError::EmptySide);
  EXPECT(kind_of("a <END> b") == MarkerError::StrayMarker);
  return {};
}

std::string derivation() {
  const auto r = secretary_boss();
  const auto alts = enumerate_alternatives(r.target, r.alignments, r.source);
  const auto want = secretary_boss_sentences();
  EXPECT(alts.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT(join(alts[i].translation) == want[i]);
  EXPECT(!check_agreement(r.target, r.alignments, toks("El secretario estaba enojada con el jefe .")));
  return {};
}

std::size_t lcs_dp(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

std::string grouping() {
  InflectionLexicon lex;
  lex.add(toks("El doctor"), toks("La doctora"));
  lex.add(toks("enojado"), toks("enojada"));
  lex.add(toks("el"), toks("la"));
  const auto g = group(toks("El doctor estaba enojado con el paciente ."),
                       toks("La doctora estaba enojada con la paciente ."), lex);
  EXPECT(std::holds_alternative<StructuredTranslation>(g));
  EXPECT(std::get<StructuredTranslation>(g) == doctor_patient().target);

  const LexiconPairs lp;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto ys = random_lexicon_structured(rng, lp);
    const auto [m, f] = split(ys);
    const auto r = group(m, f, lp.lex);
    EXPECT(std::holds_alternative<StructuredTranslation>(r));
    EXPECT(std::get<StructuredTranslation>(r) == ys);
  }
  static const char* alphabet[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 200; ++i) {
    Tokens a, b;
    for (auto n = rng() % 13; n > 0; --n) a.emplace_back(alphabet[rng() % 4]);
    for (auto n = rng() % 13; n > 0; --n) b.emplace_back(alphabet[rng() % 4]);
    EXPECT(lcs_length(a, b) == lcs_dp(a, b));
  }
  return {};
}

// Exhaustive decode: every path through the lattice, highest total score, ties to the
// lexicographically smallest choice vector.
PlainTranslation exhaustive(const InflectionLattice& lat, const SequenceScorer& scorer) {
  std::vector<std::size_t> choice(lat.sites.size(), 0);
  double best_score = -INFINITY;
  PlainTranslation best;
  while (true) {
    const auto toks_ = lat.realize(choice);
    const double s = score_continuation(scorer, {}, toks_);
    if (s > best_score) {
      best_score = s;
      best = toks_;
    }
    std::size_t i = choice.size();
    while (i > 0) {
      --i;
      if (++choice[i] < lat.sites[i].variants.size()) break;
      choice[i] = 0;
      if (i == 0) return best;
    }
    if (choice.empty()) return best;
  }
}

std::string beam_search() {
  const LexiconPairs lp;
  std::mt19937_64 rng(3);
  int built = 0;
  while (built < 100) {
    const auto ys = random_lexicon_structured(rng, lp);
    const auto [m, f] = split(ys);
    const auto lat = build_lattice(rng() % 2 ? m : f, lp.lex);
    std::size_t paths = 1;
    for (const auto& s : lat.sites) paths *= s.variants.size();
    if (paths > 64) continue;
    ++built;
    const HashScorer scorer(rng());
    const auto best = exhaustive(lat, scorer);
    EXPECT(beam_decode(lat, scorer, paths) == best);
    double prev = -INFINITY;
    for (std::size_t w : {1, 2, 4, 8}) {
      const auto d = beam_decode_detailed(lat, scorer, w);
      EXPECT(d.score >= prev);
      prev = d.score;
    }
  }
  return {};
}

std::string metrics() {
  auto boss = [](bool structured) -> GTransRecord {
    auto src = ambiguous_source("The boss left .", {1});
    if (!structured) return {src, StructuredTranslation::plain(toks("El jefe se fue .")), {}};
    return {src, Y().s("El jefe", "La jefa").w("se fue ."), {{0}}};
  };
  std::vector<EvalPair> six;
  for (int i = 0; i < 3; ++i) six.push_back({boss(true), boss(true)});
  six.push_back({boss(false), boss(true)});
  for (int i = 0; i < 2; ++i) six.push_back({boss(true), boss(false)});
  const auto alt = alternatives_pr(six);
  EXPECT(alt.precision == (Ratio{3, 4}));
  EXPECT(alt.recall == (Ratio{3, 5}));

  const auto hyp = doctor_patient();
  auto ref = hyp;
  ref.target = Y().s("El doctor", "La doctora").w("estaba").s("enojado", "enojada").w("con el paciente").s("hoy", "hoya").w(".");
  const std::vector<EvalPair> sp{{ref, hyp}};
  const auto st = structure_pr(sp);
  EXPECT(st.precision == (Ratio{2, 3}));
  EXPECT(st.recall == (Ratio{2, 3}));

  EXPECT(std::abs(corpus_bleu({toks("a b c d")}, {toks("a b c d e")}) - 100.0 * std::exp(-0.25)) <= 1e-9);
  const std::vector<Tokens> h{toks("the cat sat on the mat ."), toks("el gato")};
  EXPECT(std::abs(corpus_bleu(h, h) - 100.0) <= 1e-9);

  std::vector<RewriteAttempt> gate(100);
  // P = 38/40 = 0.95, R = 38/95 = 0.40
  for (std::size_t i = 0; i < 40; ++i) gate[i] = {true, i < 38};
  gate.resize(95);
  const auto s = rewrite_pr_f05(gate);
  EXPECT(s.precision.value() && std::abs(*s.precision.value() - 0.95) < 1e-12);
  EXPECT(s.recall.value() && std::abs(*s.recall.value() - 0.40) < 1e-12);
  EXPECT(s.f05 && std::abs(*s.f05 - 0.75) <= 0.005);
  return {};
}

std::string alignment_math() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto row = [&](std::size_t n) {
    std::vector<double> v(n);
    double sum = 0;
    for (auto& x : v) sum += (x = u(rng));
    for (auto& x : v) x /= sum;
    return v;
  };
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v;
    for (int r = 0; r < 3; ++r) {
      const auto x = row(4);
      v.insert(v.end(), x.begin(), x.end());
    }
    const ScoreMatrix p(3, 4, v);
    const std::vector<std::size_t> mids{0, 2}, gold{1, 3};
    const double l_ce = u(rng) * 5;
    EXPECT(alignment_loss(p, mids, gold, l_ce, {0.0}) == l_ce);
  }
  {
    const ScoreMatrix p(2, 2, {0.5, 0.5, 0.75, 0.25});
    const std::vector<std::size_t> mids{0, 1}, gold{0, 1};
    const double want = 2.0 - 0.025 * (std::log(0.5) + std::log(0.25));
    EXPECT(std::abs(alignment_loss(p, mids, gold, 2.0, {0.05}) - want) <= 1e-12);
  }
  for (double x : {0.1, 0.3, 0.6, 0.9}) {
    const std::vector<std::size_t> mids{0, 1}, gold{1, 0};
    auto at = [&](double v) {
      return alignment_loss(ScoreMatrix(2, 2, {1.0 - v, v, 0.4, 0.6}), mids, gold, 1.0, {0.05});
    };
    const double h = 1e-6;
    const double slope = (at(x + h) - at(x - h)) / (2 * h);
    const double want = -0.05 / (2.0 * x);
    EXPECT(std::abs(slope - want) / std::abs(want) < 1e-4);
  }
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 32;
    const auto v = row(n);
    const std::vector<std::size_t> mids{0};
    const auto a = infer_alignments(ScoreMatrix(1, n, v), mids, n)[0];
    std::size_t oracle = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (v[i] > v[oracle]) oracle = i;
    EXPECT(a == oracle);
    std::vector<double> scaled(v);
    const double c = 0.01 + u(rng) * 100;
    for (auto& x : scaled) x *= c;
    EXPECT(kernels::active().argmax(scaled) == a);
  }
  return {};
}

std::string bitext() {
  const auto rows = extract_bitext(doctor_patient(), 3, 11);
  const std::vector<std::string> want{
      "The doctor <M> was angry with the patient <M> .\tEl doctor estaba enojado con el paciente .",
      "The doctor <F> was angry with the patient <F> .\tLa doctora estaba enojada con la paciente .",
      "The doctor <M> was angry with the patient <F> .\tEl doctor estaba enojado con la paciente .",
      "The doctor <F> was angry with the patient <M> .\tLa doctora estaba enojada con el paciente ."};
  EXPECT(rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT(to_tsv(rows[i]) == want[i]);
  const auto corpus = read_gtrans_jsonl(data_path("toy_gtrans.jsonl"));
  auto run = [&] {
    std::ostringstream out;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      for (const auto& row : extract_bitext(corpus[i], 3, record_seed(7, i))) {
        if (!check_agreement(corpus[i].target, corpus[i].alignments, row.target)) return std::string();
        out << to_tsv(row) << '\n';
      }
    return out.str();
  };
  const auto a = run();
  EXPECT(!a.empty());
  EXPECT(a == run());
  return {};
}

std::string pipeline_identity() {
  const auto corpus = read_gtrans_jsonl(data_path("toy_gtrans.jsonl"));
  const auto lex = InflectionLexicon::load(data_path("lexicon.tsv"));
  EXPECT(corpus.size() == 50);
  std::vector<EvalPair> pairs;
  for (const auto& r : corpus) {
    const auto out = augment(r.source.tokens, split(r.target).first, GoldDetector(r.source),
                             OracleTransformer(r.target), GoldAligner(r), lex);
    const auto got = std::holds_alternative<GTransRecord>(out) ? std::get<GTransRecord>(out)
                                                               : std::get<Passthrough>(out).as_record();
    EXPECT(got == r);
    pairs.push_back({r, got});
  }
  const auto rep = evaluate(pairs);
  EXPECT(rep.structures.precision.value() == 1.0);
  EXPECT(rep.structures.recall.value() == 1.0);
  EXPECT(rep.alignment.value() == 1.0);
  EXPECT(rep.bleu.delta == 0.0);
  return {};
}

std::string bias_direction() {
  const auto corpus = read_gtrans_jsonl(data_path("toy_gtrans.jsonl"));
  std::vector<EvalPair> pairs;
  for (const auto& r : corpus) {
    auto h = r;
    h.target = StructuredTranslation::plain(split(r.target).first);
    h.alignments = {};
    pairs.push_back({r, h});
  }
  const auto rep = evaluate(pairs);
  EXPECT(rep.bleu.delta > 0.0);
  EXPECT(rep.bleu.bleu_masc > rep.bleu.bleu_fem);
  EXPECT(rep.alternatives.recall.value() == 0.0);
  return {};
}

}  // namespace

int main() {
  const std::vector<Check> checks{
      {"serialization roundtrip and malformed-marker errors", 1.0, serialization},
      {"derivation of the secretary/boss alternatives", 1.0, derivation},
      {"grouping, split/group identity and LCS oracle", 5.0, grouping},
      {"beam search equals exhaustive search and is monotone", 5.0, beam_search},
      {"metrics fixtures, BLEU and rewrite F0.5", 1.0, metrics},
      {"alignment loss and argmax inference", 0.0, alignment_math},
      {"bi-text rows, agreement and determinism", 0.0, bitext},
      {"pipeline identity over the bundled corpus", 10.0, pipeline_identity},
      {"masculine-only output shows bias", 0.0, bias_direction},
  };
  int failed = 0;
  for (const auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.body();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && c.limit_s > 0 && secs >= c.limit_s)
      why = "took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_s) + " s";
    std::printf("%s %s (%.3f s)%s%s\n", why.empty() ? "PASS" : "FAIL", c.name.c_str(), secs, why.empty() ? "" : ": ",
                why.c_str());
    if (!why.empty()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
