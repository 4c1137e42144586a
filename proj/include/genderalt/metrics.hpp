#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "genderalt/corpus.hpp"

namespace genderalt {

/// A count-backed ratio. value() is nullopt when the denominator is zero.
struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  std::optional<double> value() const {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  bool operator==(const Ratio&) const = default;
};

struct PrecisionRecall {
  Ratio precision;
  Ratio recall;
};

enum class StructureMatching { Multiset, Positional };

/// Sentence-level: does the hypothesis produce structures where the reference has them.
PrecisionRecall alternatives_pr(const std::vector<EvalPair>& pairs);

/// Over pairs where both sides have structures. Multiset matching pairs equal (M, F)
/// token sequences regardless of position; positional matching compares the i-th
/// structures of both sides.
PrecisionRecall structure_pr(const std::vector<EvalPair>& pairs,
                             StructureMatching mode = StructureMatching::Multiset);

/// Fraction of matched structures whose hypothesis entity has the same head index as
/// the reference entity.
Ratio alignment_accuracy(const std::vector<EvalPair>& pairs,
                         StructureMatching mode = StructureMatching::Multiset);

struct BleuStats {
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  std::size_t matches[4] = {0, 0, 0, 0};
  std::size_t totals[4] = {0, 0, 0, 0};

  double score() const;
};

/// Corpus BLEU in [0, 100] with one reference per hypothesis, 1..4-grams, no smoothing.
/// Throws ConfigError on empty input or mismatched lengths.
double corpus_bleu(const std::vector<PlainTranslation>& hyps, const std::vector<PlainTranslation>& refs);
BleuStats corpus_bleu_stats(const std::vector<PlainTranslation>& hyps, const std::vector<PlainTranslation>& refs);

struct DeltaBleu {
  double bleu_masc = 0.0;
  double bleu_fem = 0.0;
  double delta = 0.0;
};

/// BLEU on masculine-everywhere and feminine-everywhere surfaces of both sides.
DeltaBleu delta_bleu(const std::vector<EvalPair>& pairs);

struct RewriteAttempt {
  bool did_rewrite = false;
  bool matches_reference = false;
};

struct RewriteScores {
  Ratio precision;
  Ratio recall;
  std::optional<double> f05;
};

/// P = correct / attempted, R = correct / total, F0.5 from P and R.
RewriteScores rewrite_pr_f05(const std::vector<RewriteAttempt>& attempts);

/// F-beta with beta = 0.5 from already computed precision and recall.
std::optional<double> f05(double precision, double recall);

struct MetricsReport {
  std::size_t pairs = 0;
  PrecisionRecall alternatives;
  PrecisionRecall structures;
  Ratio alignment;
  DeltaBleu bleu;
};

MetricsReport evaluate(const std::vector<EvalPair>& pairs, StructureMatching mode = StructureMatching::Multiset);

nlohmann::json to_json(const MetricsReport& report);
/// Human-readable table with the columns of the usual results table (percentages).
std::string format_table(const MetricsReport& report);

}  // namespace genderalt
