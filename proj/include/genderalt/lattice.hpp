#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "genderalt/corpus.hpp"
#include "genderalt/group.hpp"
#include "genderalt/structure.hpp"

namespace genderalt {

/// Log-probability model over target tokens. The conditioning context (a tagged
/// source) is fixed when the scorer is built. Implementations must be deterministic
/// and safe to call concurrently.
class SequenceScorer {
 public:
  virtual ~SequenceScorer() = default;
  virtual double score(std::span<const Token> prefix, const Token& next) const = 0;
};

/// Sum of per-token scores of `tokens` appended after `prefix`.
double score_continuation(const SequenceScorer& scorer, const Tokens& prefix, const Tokens& tokens);

/// One rewrite site of the base translation.
struct LatticeSite {
  std::size_t begin = 0;  // token offset in base
  std::size_t end = 0;    // one past the last token
  std::vector<Tokens> variants;  // sorted, distinct, includes the base phrase

  bool operator==(const LatticeSite&) const = default;
};

/// The constrained space I(y_B): the base translation with independent phrase choices
/// at non-overlapping sites.
struct InflectionLattice {
  PlainTranslation base;
  std::vector<LatticeSite> sites;

  /// Number of distinct paths; saturates at SIZE_MAX.
  std::size_t path_count() const;
  /// Surface for one variant index per site.
  PlainTranslation realize(const std::vector<std::size_t>& choice) const;
};

/// Leftmost-longest matching of lexicon phrases (either side) over y_B. Each site lists
/// the matched phrase plus every counterpart in the lexicon, with the capitalization of
/// the matched phrase's first letter carried over to the counterparts.
InflectionLattice build_lattice(const PlainTranslation& y_b, const InflectionLexicon& lex);

/// Constrained beam search over the lattice. Hypotheses are ranked by total score, ties
/// by the lexicographically smallest variant-index sequence. With beam >= path_count()
/// this is exact.
PlainTranslation beam_decode(const InflectionLattice& lat, const SequenceScorer& scorer, std::size_t beam);

/// Same search, also returning the chosen variant indices and the path score.
struct DecodeResult {
  PlainTranslation translation;
  std::vector<std::size_t> choice;
  double score = 0.0;
};
DecodeResult beam_decode_detailed(const InflectionLattice& lat, const SequenceScorer& scorer, std::size_t beam);

/// y_M and y_F decoded over the same lattice with scorers conditioned on x_M and x_F.
std::pair<PlainTranslation, PlainTranslation> make_variants(const PlainTranslation& y_b,
                                                            const InflectionLexicon& lex,
                                                            const SequenceScorer& scorer_m,
                                                            const SequenceScorer& scorer_f,
                                                            std::size_t beam);

/// Drop structures by picking, per structure, the side with the higher average token
/// log-probability (ties go masculine). Sides are scored after the output built so far.
PlainTranslation collapse(const StructuredTranslation& ys, const SequenceScorer& scorer);

/// Entity-consistent variant: one decision per aligned entity, comparing the average token
/// log-probability pooled over all of its structures. Masculine sides are scored in the
/// all-masculine prefix, feminine sides in the all-feminine prefix.
PlainTranslation collapse_consistent(const StructuredTranslation& ys, const AlignmentMap& alignments,
                                     const SequenceScorer& scorer);

/// Add-k smoothed n-gram counts. Immutable after training and shareable between scorers.
class NgramModel {
 public:
  static inline const Token kBos = "<s>";
  static inline const Token kEos = "</s>";
  static inline const Token kUnk = "<unk>";

  /// Throws ConfigError for order < 1, k <= 0 or an empty corpus.
  NgramModel(const std::vector<Tokens>& corpus, std::size_t order, double k);

  std::size_t order() const noexcept { return order_; }
  double smoothing() const noexcept { return k_; }
  /// Closed vocabulary: training tokens plus </s> and <unk>.
  const std::vector<Token>& vocabulary() const noexcept { return vocab_; }

  /// log P(next | history), history already mapped and of any length.
  double log_prob(std::span<const Token> history, const Token& next) const;

 private:
  std::string key(std::span<const Token> history) const;
  const Token& map(const Token& t) const;

  std::size_t order_;
  double k_;
  std::vector<Token> vocab_;
  std::unordered_map<Token, std::size_t> vocab_index_;
  std::unordered_map<std::string, double> history_counts_;
  std::unordered_map<std::string, double> ngram_counts_;
};

/// SequenceScorer over an NgramModel. The context tokens are prepended to every prefix as
/// a pseudo-sentence.
class NgramScorer final : public SequenceScorer {
 public:
  NgramScorer(std::shared_ptr<const NgramModel> model, Tokens context = {});
  double score(std::span<const Token> prefix, const Token& next) const override;
  const NgramModel& model() const noexcept { return *model_; }
  NgramScorer with_context(Tokens context) const { return NgramScorer(model_, std::move(context)); }

 private:
  std::shared_ptr<const NgramModel> model_;
  Tokens context_;
};

NgramScorer ngram_scorer(const std::vector<Tokens>& corpus, std::size_t order, double k, Tokens context = {});

/// Wraps a base scorer and adds a bonus for tokens that belong only to the side of the
/// lexicon matching the gender tags in the context (all <M> -> masculine, all <F> ->
/// feminine; mixed or untagged contexts add nothing).
class LexiconGenderScorer final : public SequenceScorer {
 public:
  LexiconGenderScorer(const SequenceScorer& base, const InflectionLexicon& lex, const Tokens& context,
                      double weight = 4.0);
  double score(std::span<const Token> prefix, const Token& next) const override;

 private:
  const SequenceScorer& base_;
  std::optional<Gender> target_;
  std::unordered_map<std::string, Gender> token_side_;
  double weight_;
};

}  // namespace genderalt
