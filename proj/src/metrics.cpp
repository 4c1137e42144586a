#include "genderalt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "genderalt/structure.hpp"

namespace genderalt {

PrecisionRecall alternatives_pr(const std::vector<EvalPair>& pairs) {
  PrecisionRecall pr;
  for (const auto& p : pairs) {
    const bool ref = p.reference.target.has_structures();
    const bool hyp = p.hypothesis.target.has_structures();
    const std::size_t both = (ref && hyp) ? 1 : 0;
    pr.precision.numerator += both;
    pr.recall.numerator += both;
    pr.precision.denominator += hyp ? 1 : 0;
    pr.recall.denominator += ref ? 1 : 0;
  }
  return pr;
}

namespace {

struct Match {
  std::size_t ref;
  std::size_t hyp;
};

std::vector<Match> match_structures(const std::vector<GenderStructure>& ref, const std::vector<GenderStructure>& hyp,
                                    StructureMatching mode) {
  std::vector<Match> out;
  if (mode == StructureMatching::Positional) {
    for (std::size_t i = 0; i < std::min(ref.size(), hyp.size()); ++i)
      if (ref[i] == hyp[i]) out.push_back({i, i});
    return out;
  }
  std::vector<bool> used(ref.size(), false);
  for (std::size_t h = 0; h < hyp.size(); ++h) {
    for (std::size_t r = 0; r < ref.size(); ++r) {
      if (used[r] || !(ref[r] == hyp[h])) continue;
      used[r] = true;
      out.push_back({r, h});
      break;
    }
  }
  return out;
}

bool in_scope(const EvalPair& p) { return p.reference.target.has_structures() && p.hypothesis.target.has_structures(); }

}  // namespace

PrecisionRecall structure_pr(const std::vector<EvalPair>& pairs, StructureMatching mode) {
  PrecisionRecall pr;
  for (const auto& p : pairs) {
    if (!in_scope(p)) continue;
    const auto ref = p.reference.target.structures();
    const auto hyp = p.hypothesis.target.structures();
    const auto correct = match_structures(ref, hyp, mode).size();
    pr.precision.numerator += correct;
    pr.recall.numerator += correct;
    pr.precision.denominator += hyp.size();
    pr.recall.denominator += ref.size();
  }
  return pr;
}

Ratio alignment_accuracy(const std::vector<EvalPair>& pairs, StructureMatching mode) {
  Ratio acc;
  for (const auto& p : pairs) {
    if (!in_scope(p)) continue;
    const auto& r = p.reference;
    const auto& h = p.hypothesis;
    for (const auto& m : match_structures(r.target.structures(), h.target.structures(), mode)) {
      const auto& re = r.source.entities.at(r.alignments.by_structure.at(m.ref));
      const auto& he = h.source.entities.at(h.alignments.by_structure.at(m.hyp));
      acc.denominator += 1;
      acc.numerator += re.head_index == he.head_index ? 1 : 0;
    }
  }
  return acc;
}

namespace {

using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts count_ngrams(const Tokens& toks, std::size_t n) {
  NgramCounts out;
  if (toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::vector<std::string_view> g;
    g.reserve(n);
    for (std::size_t j = 0; j < n; ++j) g.emplace_back(toks[i + j]);
    ++out[g];
  }
  return out;
}

}  // namespace

double BleuStats::score() const {
  if (hyp_len == 0) return 0.0;
  double log_avg = 0.0;
  for (int n = 0; n < 4; ++n) {
    if (matches[n] == 0 || totals[n] == 0) return 0.0;
    log_avg += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
  }
  log_avg /= 4.0;
  const double bp =
      hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)) : 1.0;
  return 100.0 * bp * std::exp(log_avg);
}

BleuStats corpus_bleu_stats(const std::vector<PlainTranslation>& hyps, const std::vector<PlainTranslation>& refs) {
  if (hyps.empty()) throw ConfigError("BLEU needs at least one hypothesis");
  if (hyps.size() != refs.size())
    throw ConfigError("BLEU needs one reference per hypothesis (" + std::to_string(hyps.size()) + " vs " +
                      std::to_string(refs.size()) + ")");
  BleuStats st;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto& h = hyps[s];
    const auto& r = refs[s];
    st.hyp_len += h.size();
    st.ref_len += r.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto hc = count_ngrams(h, n);
      const auto rc = count_ngrams(r, n);
      for (const auto& [g, c] : hc) {
        auto it = rc.find(g);
        if (it != rc.end()) st.matches[n - 1] += std::min(c, it->second);
      }
      st.totals[n - 1] += h.size() >= n ? h.size() - n + 1 : 0;
    }
  }
  return st;
}

double corpus_bleu(const std::vector<PlainTranslation>& hyps, const std::vector<PlainTranslation>& refs) {
  return corpus_bleu_stats(hyps, refs).score();
}

DeltaBleu delta_bleu(const std::vector<EvalPair>& pairs) {
  std::vector<PlainTranslation> hm, hf, rm, rf;
  for (const auto& p : pairs) {
    auto [ym, yf] = split(p.hypothesis.target);
    auto [rym, ryf] = split(p.reference.target);
    hm.push_back(std::move(ym));
    hf.push_back(std::move(yf));
    rm.push_back(std::move(rym));
    rf.push_back(std::move(ryf));
  }
  DeltaBleu d;
  d.bleu_masc = corpus_bleu(hm, rm);
  d.bleu_fem = corpus_bleu(hf, rf);
  d.delta = std::abs(d.bleu_masc - d.bleu_fem);
  return d;
}

std::optional<double> f05(double precision, double recall) {
  const double denom = 0.25 * precision + recall;
  if (denom == 0.0) return 0.0;
  return 1.25 * precision * recall / denom;
}

RewriteScores rewrite_pr_f05(const std::vector<RewriteAttempt>& attempts) {
  if (attempts.empty()) throw ConfigError("rewrite evaluation needs at least one example");
  RewriteScores s;
  for (const auto& a : attempts) {
    const std::size_t correct = (a.did_rewrite && a.matches_reference) ? 1 : 0;
    s.precision.numerator += correct;
    s.recall.numerator += correct;
    s.precision.denominator += a.did_rewrite ? 1 : 0;
    s.recall.denominator += 1;
  }
  if (auto p = s.precision.value()) s.f05 = f05(*p, *s.recall.value());
  return s;
}

MetricsReport evaluate(const std::vector<EvalPair>& pairs, StructureMatching mode) {
  if (pairs.empty()) throw ConfigError("evaluation needs at least one reference/hypothesis pair");
  MetricsReport r;
  r.pairs = pairs.size();
  r.alternatives = alternatives_pr(pairs);
  r.structures = structure_pr(pairs, mode);
  r.alignment = alignment_accuracy(pairs, mode);
  r.bleu = delta_bleu(pairs);
  return r;
}

namespace {

nlohmann::json ratio_value(const Ratio& r) {
  if (auto v = r.value()) return *v;
  return nullptr;
}

nlohmann::json ratio_counts(const Ratio& r) { return {r.numerator, r.denominator}; }

std::string pct(const Ratio& r) {
  auto v = r.value();
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * *v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const MetricsReport& r) {
  return {{"pairs", r.pairs},
          {"alternatives_precision", ratio_value(r.alternatives.precision)},
          {"alternatives_recall", ratio_value(r.alternatives.recall)},
          {"structure_precision", ratio_value(r.structures.precision)},
          {"structure_recall", ratio_value(r.structures.recall)},
          {"alignment_accuracy", ratio_value(r.alignment)},
          {"bleu_masc", r.bleu.bleu_masc},
          {"bleu_fem", r.bleu.bleu_fem},
          {"delta_bleu", r.bleu.delta},
          {"counts",
           {{"alternatives_precision", ratio_counts(r.alternatives.precision)},
            {"alternatives_recall", ratio_counts(r.alternatives.recall)},
            {"structure_precision", ratio_counts(r.structures.precision)},
            {"structure_recall", ratio_counts(r.structures.recall)},
            {"alignment_accuracy", ratio_counts(r.alignment)}}}};
}

std::string format_table(const MetricsReport& r) {
  const std::vector<std::pair<std::string, std::string>> cols{
      {"Alt P%", pct(r.alternatives.precision)}, {"Alt R%", pct(r.alternatives.recall)},
      {"d-BLEU", fixed(r.bleu.delta)},           {"Struct P%", pct(r.structures.precision)},
      {"Struct R%", pct(r.structures.recall)},   {"Align Acc%", pct(r.alignment)},
      {"BLEU M", fixed(r.bleu.bleu_masc)},       {"BLEU F", fixed(r.bleu.bleu_fem)}};
  std::ostringstream head, sep, row;
  for (const auto& [name, value] : cols) {
    const auto w = std::max(name.size(), value.size());
    head << "| " << name << std::string(w - name.size(), ' ') << ' ';
    sep << "|-" << std::string(w, '-') << '-';
    row << "| " << std::string(w - value.size(), ' ') << value << ' ';
  }
  head << "|\n";
  sep << "|\n";
  row << "|\n";
  return head.str() + sep.str() + row.str();
}

}  // namespace genderalt
