#include "genderalt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "genderalt/derive.hpp"

namespace genderalt {

double score_continuation(const SequenceScorer& scorer, const Tokens& prefix, const Tokens& tokens) {
  Tokens buf = prefix;
  double total = 0.0;
  for (const auto& t : tokens) {
    total += scorer.score(buf, t);
    buf.push_back(t);
  }
  return total;
}

std::size_t InflectionLattice::path_count() const {
  std::size_t n = 1;
  for (const auto& s : sites) {
    if (n > std::numeric_limits<std::size_t>::max() / s.variants.size()) return std::numeric_limits<std::size_t>::max();
    n *= s.variants.size();
  }
  return n;
}

PlainTranslation InflectionLattice::realize(const std::vector<std::size_t>& choice) const {
  if (choice.size() != sites.size()) throw InvalidRecord("choice length does not match lattice site count");
  PlainTranslation out;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    out.insert(out.end(), base.begin() + static_cast<std::ptrdiff_t>(pos),
               base.begin() + static_cast<std::ptrdiff_t>(sites[s].begin));
    const auto& v = sites[s].variants.at(choice[s]);
    out.insert(out.end(), v.begin(), v.end());
    pos = sites[s].end;
  }
  out.insert(out.end(), base.begin() + static_cast<std::ptrdiff_t>(pos), base.end());
  return out;
}

namespace {

std::string phrase_key(const Tokens& lower) { return join(lower, "\x1f"); }

bool starts_upper(const Token& t) {
  if (t.empty()) return false;
  auto c = static_cast<unsigned char>(t[0]);
  if (c >= 'A' && c <= 'Z') return true;
  if (c == 0xC3 && t.size() > 1) {
    auto d = static_cast<unsigned char>(t[1]);
    return d >= 0x80 && d <= 0x9E && d != 0x97;
  }
  return false;
}

Token capitalize(Token t) {
  if (t.empty()) return t;
  auto c = static_cast<unsigned char>(t[0]);
  if (c >= 'a' && c <= 'z') {
    t[0] = static_cast<char>(c - 32);
  } else if (c == 0xC3 && t.size() > 1) {
    auto d = static_cast<unsigned char>(t[1]);
    if (d >= 0xA0 && d <= 0xBE && d != 0xB7) t[1] = static_cast<char>(d - 0x20);
  }
  return t;
}

}  // namespace

InflectionLattice build_lattice(const PlainTranslation& y_b, const InflectionLexicon& lex) {
  // phrase (lowercased) -> every phrase it pairs with, on either side.
  std::map<std::string, std::set<Tokens>> counterparts;
  std::size_t max_len = 0;
  for (const auto& [m, f] : lex.pairs()) {
    counterparts[phrase_key(m)].insert(f);
    counterparts[phrase_key(f)].insert(m);
    max_len = std::max({max_len, m.size(), f.size()});
  }

  InflectionLattice lat{y_b, {}};
  const auto lower = lowercase(y_b);
  std::size_t i = 0;
  while (i < y_b.size()) {
    bool matched = false;
    for (std::size_t len = std::min(max_len, y_b.size() - i); len >= 1; --len) {
      Tokens window(lower.begin() + static_cast<std::ptrdiff_t>(i),
                    lower.begin() + static_cast<std::ptrdiff_t>(i + len));
      auto it = counterparts.find(phrase_key(window));
      if (it == counterparts.end()) continue;

      Tokens original(y_b.begin() + static_cast<std::ptrdiff_t>(i), y_b.begin() + static_cast<std::ptrdiff_t>(i + len));
      std::set<Tokens> variants{original};
      const bool upper = starts_upper(original.front());
      for (auto v : it->second) {
        if (upper) v.front() = capitalize(v.front());
        variants.insert(std::move(v));
      }
      if (variants.size() >= 2) {
        lat.sites.push_back({i, i + len, {variants.begin(), variants.end()}});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return lat;
}

namespace {

struct Hyp {
  Tokens tokens;
  std::vector<std::size_t> choice;
  double score = 0.0;
};

void extend(Hyp& h, const SequenceScorer& scorer, const Tokens& base, std::size_t from, std::size_t to) {
  for (std::size_t p = from; p < to; ++p) {
    h.score += scorer.score(h.tokens, base[p]);
    h.tokens.push_back(base[p]);
  }
}

bool better(const Hyp& a, const Hyp& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.choice < b.choice;
}

}  // namespace

namespace {

// One pass of plain beam search. `widest` receives the largest candidate set seen, the
// width beyond which the search is exhaustive.
Hyp plain_beam(const InflectionLattice& lat, const SequenceScorer& scorer, std::size_t beam, std::size_t& widest) {
  const auto& sites = lat.sites;
  const auto segment_end = [&](std::size_t s) { return s < sites.size() ? sites[s].begin : lat.base.size(); };

  std::vector<Hyp> hyps(1);
  extend(hyps[0], scorer, lat.base, 0, segment_end(0));

  for (std::size_t s = 0; s < sites.size(); ++s) {
    std::vector<Hyp> next;
    next.reserve(hyps.size() * sites[s].variants.size());
    for (const auto& h : hyps) {
      for (std::size_t v = 0; v < sites[s].variants.size(); ++v) {
        Hyp n = h;
        n.choice.push_back(v);
        for (const auto& t : sites[s].variants[v]) {
          n.score += scorer.score(n.tokens, t);
          n.tokens.push_back(t);
        }
        extend(n, scorer, lat.base, sites[s].end, segment_end(s + 1));
        next.push_back(std::move(n));
      }
    }
    widest = std::max(widest, next.size());
    const auto keep = std::min(beam, next.size());
    std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(keep), next.end(), better);
    next.resize(keep);
    hyps = std::move(next);
  }
  return std::move(hyps.front());
}

}  // namespace

DecodeResult beam_decode_detailed(const InflectionLattice& lat, const SequenceScorer& scorer, std::size_t beam) {
  if (beam == 0) throw ConfigError("beam width must be at least 1");
  // Best over all widths up to `beam`, so a wider beam is never worse.
  std::size_t widest = 1;
  Hyp best = plain_beam(lat, scorer, 1, widest);
  for (std::size_t w = 2; w <= beam && w <= widest; ++w) {
    Hyp h = plain_beam(lat, scorer, w, widest);
    if (better(h, best)) best = std::move(h);
  }
  return {std::move(best.tokens), std::move(best.choice), best.score};
}

PlainTranslation beam_decode(const InflectionLattice& lat, const SequenceScorer& scorer, std::size_t beam) {
  return beam_decode_detailed(lat, scorer, beam).translation;
}

std::pair<PlainTranslation, PlainTranslation> make_variants(const PlainTranslation& y_b, const InflectionLexicon& lex,
                                                            const SequenceScorer& scorer_m,
                                                            const SequenceScorer& scorer_f, std::size_t beam) {
  const auto lat = build_lattice(y_b, lex);
  return {beam_decode(lat, scorer_m, beam), beam_decode(lat, scorer_f, beam)};
}

namespace {

double average(const SequenceScorer& scorer, const Tokens& prefix, const Tokens& phrase) {
  return score_continuation(scorer, prefix, phrase) / static_cast<double>(phrase.size());
}

}  // namespace

PlainTranslation collapse(const StructuredTranslation& ys, const SequenceScorer& scorer) {
  PlainTranslation out;
  for (const auto& seg : ys.segments()) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      out.push_back(*tok);
      continue;
    }
    const auto& s = std::get<GenderStructure>(seg);
    const auto& pick = average(scorer, out, s.masculine) >= average(scorer, out, s.feminine) ? s.masculine : s.feminine;
    out.insert(out.end(), pick.begin(), pick.end());
  }
  return out;
}

PlainTranslation collapse_consistent(const StructuredTranslation& ys, const AlignmentMap& alignments,
                                     const SequenceScorer& scorer) {
  if (alignments.by_structure.size() != ys.structure_count())
    throw InvalidRecord("alignment count does not match structure count");
  struct Pool {
    double m_sum = 0, f_sum = 0;
    std::size_t m_len = 0, f_len = 0;
  };
  std::map<std::size_t, Pool> pools;
  Tokens pref_m, pref_f;
  std::size_t si = 0;
  for (const auto& seg : ys.segments()) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      pref_m.push_back(*tok);
      pref_f.push_back(*tok);
      continue;
    }
    const auto& s = std::get<GenderStructure>(seg);
    auto& pool = pools[alignments.by_structure[si++]];
    pool.m_sum += score_continuation(scorer, pref_m, s.masculine);
    pool.f_sum += score_continuation(scorer, pref_f, s.feminine);
    pool.m_len += s.masculine.size();
    pool.f_len += s.feminine.size();
    pref_m.insert(pref_m.end(), s.masculine.begin(), s.masculine.end());
    pref_f.insert(pref_f.end(), s.feminine.begin(), s.feminine.end());
  }
  GenderAssignment g;
  for (const auto& [entity, p] : pools) {
    const double m = p.m_sum / static_cast<double>(p.m_len);
    const double f = p.f_sum / static_cast<double>(p.f_len);
    g[entity] = m >= f ? Gender::Masculine : Gender::Feminine;
  }
  return derive(ys, alignments, g);
}

// ---------------------------------------------------------------------------
// n-gram reference scorer

NgramModel::NgramModel(const std::vector<Tokens>& corpus, std::size_t order, double k) : order_(order), k_(k) {
  if (order < 1) throw ConfigError("n-gram order must be at least 1");
  if (!(k > 0.0)) throw ConfigError("smoothing constant must be positive");
  if (corpus.empty()) throw ConfigError("n-gram training corpus is empty");

  std::set<Token> vocab{kEos, kUnk};
  for (const auto& sent : corpus) vocab.insert(sent.begin(), sent.end());
  vocab_.assign(vocab.begin(), vocab.end());
  for (std::size_t i = 0; i < vocab_.size(); ++i) vocab_index_[vocab_[i]] = i;

  for (const auto& sent : corpus) {
    Tokens padded(order_ - 1, kBos);
    padded.insert(padded.end(), sent.begin(), sent.end());
    padded.push_back(kEos);
    for (std::size_t t = order_ - 1; t < padded.size(); ++t) {
      std::span<const Token> hist(padded.data() + t - (order_ - 1), order_ - 1);
      const auto h = key(hist);
      history_counts_[h] += 1.0;
      ngram_counts_[h + '\x1e' + padded[t]] += 1.0;
    }
  }
}

std::string NgramModel::key(std::span<const Token> history) const {
  std::string k;
  for (const auto& t : history) {
    k += t;
    k += '\x1f';
  }
  return k;
}

const Token& NgramModel::map(const Token& t) const {
  if (t == kBos) return kBos;
  return vocab_index_.count(t) ? t : kUnk;
}

double NgramModel::log_prob(std::span<const Token> history, const Token& next) const {
  const auto need = order_ - 1;
  Tokens hist;
  hist.reserve(need);
  const auto have = std::min(need, history.size());
  for (std::size_t i = have; i < need; ++i) hist.push_back(kBos);
  for (std::size_t i = history.size() - have; i < history.size(); ++i) hist.push_back(map(history[i]));

  const auto h = key(hist);
  double ch = 0.0, chw = 0.0;
  if (auto it = history_counts_.find(h); it != history_counts_.end()) ch = it->second;
  if (auto it = ngram_counts_.find(h + '\x1e' + map(next)); it != ngram_counts_.end()) chw = it->second;
  const auto v = static_cast<double>(vocab_.size());
  return std::log((chw + k_) / (ch + k_ * v));
}

NgramScorer::NgramScorer(std::shared_ptr<const NgramModel> model, Tokens context)
    : model_(std::move(model)), context_(std::move(context)) {
  if (!model_) throw ConfigError("n-gram scorer without a model");
}

double NgramScorer::score(std::span<const Token> prefix, const Token& next) const {
  const auto need = model_->order() - 1;
  if (prefix.size() >= need || context_.empty()) return model_->log_prob(prefix, next);
  Tokens hist;
  const auto from_ctx = std::min(context_.size(), need - prefix.size());
  hist.insert(hist.end(), context_.end() - static_cast<std::ptrdiff_t>(from_ctx), context_.end());
  hist.insert(hist.end(), prefix.begin(), prefix.end());
  return model_->log_prob(hist, next);
}

NgramScorer ngram_scorer(const std::vector<Tokens>& corpus, std::size_t order, double k, Tokens context) {
  return NgramScorer(std::make_shared<const NgramModel>(corpus, order, k), std::move(context));
}

LexiconGenderScorer::LexiconGenderScorer(const SequenceScorer& base, const InflectionLexicon& lex,
                                         const Tokens& context, double weight)
    : base_(base), weight_(weight) {
  const auto m_tags = std::count(context.begin(), context.end(), Token(kTagM));
  const auto f_tags = std::count(context.begin(), context.end(), Token(kTagF));
  if (m_tags > 0 && f_tags == 0) target_ = Gender::Masculine;
  if (f_tags > 0 && m_tags == 0) target_ = Gender::Feminine;

  std::set<std::string> conflicted;
  auto mark = [&](const std::string& tok, Gender g) {
    if (conflicted.count(tok)) return;
    auto [it, fresh] = token_side_.emplace(tok, g);
    if (!fresh && it->second != g) {
      token_side_.erase(it);
      conflicted.insert(tok);
    }
  };
  for (const auto& [m, f] : lex.pairs()) {
    std::set<std::string> ms(m.begin(), m.end()), fs(f.begin(), f.end());
    for (const auto& t : ms)
      if (!fs.count(t)) mark(t, Gender::Masculine);
    for (const auto& t : fs)
      if (!ms.count(t)) mark(t, Gender::Feminine);
  }
}

double LexiconGenderScorer::score(std::span<const Token> prefix, const Token& next) const {
  double s = base_.score(prefix, next);
  if (!target_) return s;
  auto it = token_side_.find(lowercase(next));
  if (it == token_side_.end()) return s;
  return s + (it->second == *target_ ? weight_ : -weight_);
}

}  // namespace genderalt
