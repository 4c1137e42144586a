#include "genderalt/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace genderalt {

using nlohmann::json;

std::vector<std::size_t> AnnotatedSource::ambiguous_entities() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entities.size(); ++i)
    if (entities[i].label == EntityLabel::Ambiguous) out.push_back(i);
  return out;
}

bool AnnotatedSource::is_ambiguous(std::size_t entity) const {
  return entity < entities.size() && entities[entity].label == EntityLabel::Ambiguous;
}

void validate(const AnnotatedSource& src) {
  std::set<std::size_t> heads;
  for (std::size_t e = 0; e < src.entities.size(); ++e) {
    const auto head = src.entities[e].head_index;
    if (head >= src.tokens.size())
      throw InvalidRecord("entity " + std::to_string(e) + " head index " + std::to_string(head) +
                          " out of range for " + std::to_string(src.tokens.size()) + " source tokens");
    if (!heads.insert(head).second)
      throw InvalidRecord("duplicate entity head index " + std::to_string(head));
  }
}

void validate(const GTagRecord& rec) {
  validate(rec.source);
  if (rec.source.entities.empty()) throw InvalidRecord("G-Tag record without entity annotations");
}

void validate(const GTransRecord& rec) {
  validate(rec.source);
  const auto k = rec.target.structure_count();
  if (rec.alignments.by_structure.size() != k)
    throw InvalidRecord("alignment count " + std::to_string(rec.alignments.by_structure.size()) +
                        " does not match structure count " + std::to_string(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto e = rec.alignments.by_structure[i];
    if (e >= rec.source.entities.size())
      throw InvalidRecord("structure " + std::to_string(i) + " aligned to missing entity " + std::to_string(e));
    if (!rec.source.is_ambiguous(e))
      throw InvalidRecord("structure " + std::to_string(i) + " aligned to non-ambiguous entity " + std::to_string(e));
  }
}

void validate(const EvalPair& pair) {
  validate(pair.reference);
  validate(pair.hypothesis);
  if (pair.reference.source.tokens != pair.hypothesis.source.tokens)
    throw InvalidRecord("reference and hypothesis sources differ");
}

namespace {

Tokens tokens_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw InvalidRecord(std::string("field '") + field + "' must be an array of strings");
  Tokens out;
  out.reserve(j.size());
  for (const auto& t : j) {
    if (!t.is_string()) throw InvalidRecord(std::string("field '") + field + "' must be an array of strings");
    out.push_back(t.get<std::string>());
  }
  return out;
}

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw InvalidRecord(std::string("missing field '") + field + "'");
  return *it;
}

json entities_to_json(const std::vector<EntityAnnotation>& ents) {
  json out = json::array();
  for (const auto& e : ents) out.push_back({{"i", e.head_index}, {"g", std::string(1, label_code(e.label))}});
  return out;
}

}  // namespace

AnnotatedSource source_from_json(const json& j) {
  if (!j.is_object()) throw InvalidRecord("record must be a JSON object");
  AnnotatedSource src;
  src.tokens = tokens_from_json(require(j, "src"), "src");
  for (const auto& t : src.tokens)
    if (is_marker(t)) throw InvalidRecord("reserved marker token '" + t + "' in source");
  if (auto it = j.find("entities"); it != j.end()) {
    if (!it->is_array()) throw InvalidRecord("field 'entities' must be an array");
    for (const auto& e : *it) {
      if (!e.is_object()) throw InvalidRecord("entity must be an object");
      const auto& idx = require(e, "i");
      if (!idx.is_number_integer() || idx.get<long long>() < 0)
        throw InvalidRecord("entity index must be a non-negative integer");
      const auto& g = require(e, "g");
      if (!g.is_string()) throw InvalidRecord("entity label must be a string");
      src.entities.push_back({idx.get<std::size_t>(), parse_label(g.get<std::string>())});
    }
  }
  validate(src);
  return src;
}

StructuredTranslation structured_from_json(const json& j) {
  if (!j.is_array()) throw InvalidRecord("field 'tgt' must be an array");
  std::vector<StructuredTranslation::Segment> segs;
  for (const auto& seg : j) {
    if (seg.is_string()) {
      segs.emplace_back(seg.get<std::string>());
    } else if (seg.is_object()) {
      segs.emplace_back(GenderStructure{tokens_from_json(require(seg, "m"), "m"), tokens_from_json(require(seg, "f"), "f")});
    } else {
      throw InvalidRecord("target segment must be a string or {\"m\", \"f\"} object");
    }
  }
  return StructuredTranslation(std::move(segs));
}

json to_json(const StructuredTranslation& ys) {
  json out = json::array();
  for (const auto& seg : ys.segments()) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      out.push_back(*tok);
    } else {
      const auto& s = std::get<GenderStructure>(seg);
      out.push_back({{"m", s.masculine}, {"f", s.feminine}});
    }
  }
  return out;
}

json to_json(const GTagRecord& rec) { return {{"src", rec.source.tokens}, {"entities", entities_to_json(rec.source.entities)}}; }

json to_json(const GTransRecord& rec) {
  return {{"src", rec.source.tokens},
          {"entities", entities_to_json(rec.source.entities)},
          {"tgt", to_json(rec.target)},
          {"align", rec.alignments.by_structure}};
}

GTagRecord gtag_from_json(const json& j) {
  GTagRecord rec{source_from_json(j)};
  validate(rec);
  return rec;
}

GTransRecord gtrans_from_json(const json& j) {
  GTransRecord rec;
  rec.source = source_from_json(j);
  rec.target = structured_from_json(require(j, "tgt"));
  const auto& al = require(j, "align");
  if (!al.is_array()) throw InvalidRecord("field 'align' must be an array");
  for (const auto& a : al) {
    if (!a.is_number_integer() || a.get<long long>() < 0)
      throw InvalidRecord("alignment entries must be non-negative integers");
    rec.alignments.by_structure.push_back(a.get<std::size_t>());
  }
  validate(rec);
  return rec;
}

namespace {

template <typename Record, typename Parse>
std::vector<Record> parse_lines(std::istream& in, Parse parse_record) {
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw JsonlError(lineno, std::string("malformed JSON: ") + e.what());
    }
    try {
      out.push_back(parse_record(j));
    } catch (const Error& e) {
      throw JsonlError(lineno, e.what());
    } catch (const json::exception& e) {
      throw JsonlError(lineno, e.what());
    }
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

template <typename Record>
void write_lines(const std::vector<Record>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) {
    validate(r);
    out << to_json(r).dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

std::vector<GTransRecord> parse_gtrans_jsonl(std::istream& in) {
  return parse_lines<GTransRecord>(in, [](const json& j) { return gtrans_from_json(j); });
}

std::vector<GTagRecord> read_gtag_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_lines<GTagRecord>(in, [](const json& j) { return gtag_from_json(j); });
}

std::vector<GTransRecord> read_gtrans_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_gtrans_jsonl(in);
}

void write_jsonl(const std::vector<GTagRecord>& records, const std::filesystem::path& path) { write_lines(records, path); }

void write_jsonl(const std::vector<GTransRecord>& records, const std::filesystem::path& path) {
  write_lines(records, path);
}

std::vector<EvalPair> read_eval_pairs(const std::filesystem::path& reference, const std::filesystem::path& hypothesis) {
  auto refs = read_gtrans_jsonl(reference);
  auto hyps = read_gtrans_jsonl(hypothesis);
  if (refs.size() != hyps.size())
    throw Error("reference has " + std::to_string(refs.size()) + " records, hypothesis has " +
                std::to_string(hyps.size()));
  std::vector<EvalPair> pairs;
  pairs.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    EvalPair p{std::move(refs[i]), std::move(hyps[i])};
    try {
      validate(p);
    } catch (const Error& e) {
      throw JsonlError(i + 1, e.what());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace genderalt
