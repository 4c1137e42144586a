#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "genderalt/adapters.hpp"
#include "genderalt/align.hpp"
#include "genderalt/bitext.hpp"
#include "genderalt/corpus.hpp"
#include "genderalt/group.hpp"
#include "genderalt/lattice.hpp"

namespace genderalt {

/// Per-token detector output. None marks a token that is not an entity head.
enum class TokenLabel { Ambiguous, Masculine, Feminine, None };

char token_label_code(TokenLabel l);
TokenLabel parse_token_label(std::string_view code);

/// Step 1: find entity heads and their gender labels.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<TokenLabel> annotate(const Tokens& tokens) const = 0;
};

/// Step 2: rewrite the base translation into all-masculine and all-feminine forms.
class Transformer {
 public:
  virtual ~Transformer() = default;
  virtual std::pair<PlainTranslation, PlainTranslation> variants(const TaggedSource& x_m, const TaggedSource& x_f,
                                                                 const PlainTranslation& y_b) const = 0;
};

/// Step 4: align each structure to an ambiguous entity.
class Aligner {
 public:
  virtual ~Aligner() = default;
  virtual AlignmentMap align(const AnnotatedSource& x, const StructuredTranslation& ys) const = 0;
};

/// Replays a known annotation.
class GoldDetector final : public Detector {
 public:
  explicit GoldDetector(AnnotatedSource gold) : gold_(std::move(gold)) {}
  std::vector<TokenLabel> annotate(const Tokens& tokens) const override;

 private:
  AnnotatedSource gold_;
};

/// Keyword detector: role nouns from a word list; a gendered pronoun within `window`
/// tokens labels the noun M or F (nearest pronoun wins, equidistant conflict stays A).
/// A possessive directly before the noun refers to someone else and is ignored.
/// Lexically gendered nouns (mother, king) are labeled by the list; masculine generics
/// (chairman) are plain role nouns.
class RuleDetector final : public Detector {
 public:
  explicit RuleDetector(std::size_t window = 5);
  /// Word list lines: "noun", "noun<TAB>M", "noun<TAB>F" or "noun<TAB>generic".
  static RuleDetector from_file(const std::filesystem::path& path, std::size_t window = 5);
  std::vector<TokenLabel> annotate(const Tokens& tokens) const override;

 private:
  std::size_t window_;
  std::unordered_map<std::string, std::optional<Gender>> nouns_;
};

RuleDetector rule_detector(std::size_t window);

/// Request {"x": [tok...]} -> response {"labels": ["A"|"M"|"F"|"N", ...]}.
class AdapterDetector final : public Detector {
 public:
  explicit AdapterDetector(JsonTransport& transport) : transport_(transport) {}
  std::vector<TokenLabel> annotate(const Tokens& tokens) const override;

 private:
  JsonTransport& transport_;
};

/// Returns the two sides of a known structured translation, ignoring its inputs.
class OracleTransformer final : public Transformer {
 public:
  explicit OracleTransformer(const StructuredTranslation& gold);
  std::pair<PlainTranslation, PlainTranslation> variants(const TaggedSource&, const TaggedSource&,
                                                         const PlainTranslation&) const override {
    return sides_;
  }

 private:
  std::pair<PlainTranslation, PlainTranslation> sides_;
};

/// Lattice rescoring with a shared n-gram model wrapped in a tag-aware lexicon scorer.
class LatticeTransformer final : public Transformer {
 public:
  LatticeTransformer(const InflectionLexicon& lex, std::shared_ptr<const NgramModel> model, std::size_t beam = 16);
  std::pair<PlainTranslation, PlainTranslation> variants(const TaggedSource& x_m, const TaggedSource& x_f,
                                                         const PlainTranslation& y_b) const override;

 private:
  const InflectionLexicon& lex_;
  std::shared_ptr<const NgramModel> model_;
  std::size_t beam_;
};

enum class PromptPreset { Editor, Generator };

struct PromptExemplar {
  Tokens source;
  PlainTranslation masculine;
  PlainTranslation feminine;
  std::vector<std::size_t> ambiguous_heads;
};

struct EditorAdapterConfig {
  std::string endpoint;  // transport spec, see make_transport
  PromptPreset preset = PromptPreset::Editor;
  std::vector<PromptExemplar> in_context_examples;

  static constexpr std::size_t kDefaultExamples = 6;
};

/// First `count` structured records of a corpus as prompt exemplars.
std::vector<PromptExemplar> exemplars_from_corpus(const std::vector<GTransRecord>& corpus,
                                                  std::size_t count = EditorAdapterConfig::kDefaultExamples);

/// Throws ConfigError without exemplars.
std::string build_editor_prompt(const EditorAdapterConfig& cfg, const AnnotatedSource& x, const PlainTranslation& y_b,
                                Gender direction);

/// Request {"xM","xF","yB"} (+ "promptM"/"promptF" when a prompt config is given) ->
/// response {"yM","yF"}.
class AdapterTransformer final : public Transformer {
 public:
  AdapterTransformer(JsonTransport& transport, std::optional<EditorAdapterConfig> prompts = std::nullopt);
  std::pair<PlainTranslation, PlainTranslation> variants(const TaggedSource& x_m, const TaggedSource& x_f,
                                                         const PlainTranslation& y_b) const override;

 private:
  JsonTransport& transport_;
  std::optional<EditorAdapterConfig> prompts_;
};

/// Reuses the alignment of a known record: each structure takes the entity of the first
/// unused gold structure with identical sides.
class GoldAligner final : public Aligner {
 public:
  explicit GoldAligner(GTransRecord gold) : gold_(std::move(gold)) {}
  AlignmentMap align(const AnnotatedSource& x, const StructuredTranslation& ys) const override;

 private:
  GTransRecord gold_;
};

class HeuristicAligner final : public Aligner {
 public:
  explicit HeuristicAligner(std::optional<BilingualHints> hints = std::nullopt) : hints_(std::move(hints)) {}
  AlignmentMap align(const AnnotatedSource& x, const StructuredTranslation& ys) const override;

 private:
  std::optional<BilingualHints> hints_;
};

/// One request per structure: {"x": [...], "yA": [...]} -> {"aligned": [0/1 per x token]}.
class AdapterAligner final : public Aligner {
 public:
  explicit AdapterAligner(JsonTransport& transport) : transport_(transport) {}
  AlignmentMap align(const AnnotatedSource& x, const StructuredTranslation& ys) const override;

 private:
  JsonTransport& transport_;
};

enum class PassthroughReason { NoAmbiguousEntity, Ungroupable, NoStructures };

const char* to_string(PassthroughReason r);

/// Output when no structures are emitted: the source (with whatever entities were
/// detected) and the unchanged base translation.
struct Passthrough {
  AnnotatedSource source;
  PlainTranslation y_b;
  PassthroughReason reason = PassthroughReason::NoAmbiguousEntity;

  /// As a structure-free G-Trans record.
  GTransRecord as_record() const;
};

using AugmentResult = std::variant<GTransRecord, Passthrough>;

/// Detect -> transform -> group -> align. Adapter failures propagate as exceptions; the
/// batch runner turns them into per-record errors.
AugmentResult augment(const Tokens& x, const PlainTranslation& y_b, const Detector& detector,
                      const Transformer& transformer, const Aligner& aligner, const InflectionLexicon& lex);

/// Source built from per-token labels: every non-None token becomes an entity, in order.
AnnotatedSource annotate_source(const Tokens& x, const std::vector<TokenLabel>& labels);

/// One augmentation input line. Gold fields are present only when annotations exist.
struct AugmentInput {
  Tokens src;
  PlainTranslation y_b;
  std::optional<GTransRecord> gold;
};

/// {"src", "yB"} with optional "entities"/"tgt"/"align". yB defaults to the masculine
/// side of tgt.
AugmentInput augment_input_from_json(const nlohmann::json& j);

struct BatchOutcome {
  std::optional<AugmentResult> result;
  std::string error;  // non-empty iff result is empty
};

/// Factory for per-record components; lets gold adapters bind to each input.
struct ComponentFactory {
  std::function<std::unique_ptr<Detector>(const AugmentInput&)> detector;
  std::function<std::unique_ptr<Transformer>(const AugmentInput&)> transformer;
  std::function<std::unique_ptr<Aligner>(const AugmentInput&)> aligner;
};

/// Runs augment over all inputs with at most `jobs` threads; output order matches input.
std::vector<BatchOutcome> augment_batch(const std::vector<AugmentInput>& inputs, const ComponentFactory& factory,
                                        const InflectionLexicon& lex, std::size_t jobs = 1);

}  // namespace genderalt
