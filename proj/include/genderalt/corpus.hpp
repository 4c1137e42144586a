#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genderalt/structure.hpp"
#include "genderalt/types.hpp"

namespace genderalt {

struct EntityAnnotation {
  std::size_t head_index = 0;
  EntityLabel label = EntityLabel::Ambiguous;

  bool operator==(const EntityAnnotation&) const = default;
};

/// Tokenized source sentence plus its annotated entity head words.
struct AnnotatedSource {
  Tokens tokens;
  std::vector<EntityAnnotation> entities;

  /// Entity-list indices of the Ambiguous entities (G_a), in list order.
  std::vector<std::size_t> ambiguous_entities() const;
  bool is_ambiguous(std::size_t entity) const;

  bool operator==(const AnnotatedSource&) const = default;
};

/// Structure index -> entity-list index. Each structure is governed by exactly one entity.
struct AlignmentMap {
  std::vector<std::size_t> by_structure;

  bool operator==(const AlignmentMap&) const = default;
};

struct GTagRecord {
  AnnotatedSource source;

  bool operator==(const GTagRecord&) const = default;
};

struct GTransRecord {
  AnnotatedSource source;
  StructuredTranslation target;
  AlignmentMap alignments;

  bool operator==(const GTransRecord&) const = default;
};

struct EvalPair {
  GTransRecord reference;
  GTransRecord hypothesis;
};

// Invariant checks; each throws InvalidRecord with a description of the first violation.
void validate(const AnnotatedSource& src);
void validate(const GTagRecord& rec);
void validate(const GTransRecord& rec);
void validate(const EvalPair& pair);

// JSON mapping for one record (one JSONL line). from_json_* validate the result.
nlohmann::json to_json(const GTagRecord& rec);
nlohmann::json to_json(const GTransRecord& rec);
nlohmann::json to_json(const StructuredTranslation& ys);
GTagRecord gtag_from_json(const nlohmann::json& j);
GTransRecord gtrans_from_json(const nlohmann::json& j);
StructuredTranslation structured_from_json(const nlohmann::json& j);
AnnotatedSource source_from_json(const nlohmann::json& j);

/// Raised by the JSONL readers; carries the 1-based line number.
class JsonlError : public Error {
 public:
  JsonlError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

std::vector<GTagRecord> read_gtag_jsonl(const std::filesystem::path& path);
std::vector<GTransRecord> read_gtrans_jsonl(const std::filesystem::path& path);
std::vector<GTransRecord> parse_gtrans_jsonl(std::istream& in);

void write_jsonl(const std::vector<GTagRecord>& records, const std::filesystem::path& path);
void write_jsonl(const std::vector<GTransRecord>& records, const std::filesystem::path& path);

/// Reference/hypothesis files matched by line number.
std::vector<EvalPair> read_eval_pairs(const std::filesystem::path& reference,
                                      const std::filesystem::path& hypothesis);

}  // namespace genderalt
