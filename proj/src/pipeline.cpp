#include "genderalt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "genderalt/derive.hpp"

namespace genderalt {

char token_label_code(TokenLabel l) {
  switch (l) {
    case TokenLabel::Ambiguous:
      return 'A';
    case TokenLabel::Masculine:
      return 'M';
    case TokenLabel::Feminine:
      return 'F';
    case TokenLabel::None:
      return 'N';
  }
  return '?';
}

TokenLabel parse_token_label(std::string_view code) {
  if (code == "A") return TokenLabel::Ambiguous;
  if (code == "M") return TokenLabel::Masculine;
  if (code == "F") return TokenLabel::Feminine;
  if (code == "N") return TokenLabel::None;
  throw AdapterError("unknown token label '" + std::string(code) + "'");
}

std::vector<TokenLabel> GoldDetector::annotate(const Tokens& tokens) const {
  if (tokens != gold_.tokens) throw InvalidRecord("gold detector applied to a different sentence");
  std::vector<TokenLabel> out(tokens.size(), TokenLabel::None);
  for (const auto& e : gold_.entities) {
    switch (e.label) {
      case EntityLabel::Ambiguous:
        out[e.head_index] = TokenLabel::Ambiguous;
        break;
      case EntityLabel::Masculine:
        out[e.head_index] = TokenLabel::Masculine;
        break;
      case EntityLabel::Feminine:
        out[e.head_index] = TokenLabel::Feminine;
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule detector

namespace {

const char* const kRoleNouns[] = {
    "accountant", "actor",     "architect", "artist",    "assistant", "attendant", "auditor",   "author",
    "baker",      "banker",    "boss",      "builder",   "carpenter", "cashier",   "ceo",       "chef",
    "child",      "cleaner",   "clerk",     "coach",     "colleague", "cook",      "counselor", "cousin",
    "dancer",     "dentist",   "designer",  "developer", "director",  "doctor",    "driver",    "editor",
    "employee",   "engineer",  "farmer",    "friend",    "guard",     "hairdresser", "housekeeper", "janitor",
    "journalist", "judge",     "laborer",   "lawyer",    "librarian", "manager",   "mechanic",  "musician",
    "neighbor",   "nurse",     "officer",   "painter",   "patient",   "pharmacist", "physician", "pilot",
    "player",     "professor", "programmer", "psychologist", "receptionist", "researcher", "scientist", "secretary",
    "singer",     "student",   "supervisor", "surgeon",  "tailor",    "teacher",   "technician", "therapist",
    "visitor",    "worker",    "writer"};

const char* const kMasculineNouns[] = {"man", "boy", "father", "son", "brother", "husband", "king", "uncle",
                                       "nephew", "grandfather", "gentleman", "waiter"};
const char* const kFeminineNouns[] = {"woman", "girl", "mother", "daughter", "sister", "wife", "queen", "aunt",
                                      "niece", "grandmother", "lady", "waitress", "actress"};
// Masculine generics: morphologically masculine but routinely used for anyone.
const char* const kGenericNouns[] = {"chairman", "fireman", "policeman", "businessman", "spokesman", "salesman",
                                     "congressman", "foreman"};

const char* const kMasculinePronouns[] = {"he", "him", "his", "himself"};
const char* const kFemininePronouns[] = {"she", "her", "hers", "herself"};

bool is_possessive(const std::string& lower) { return lower == "his" || lower == "her"; }

std::optional<Gender> pronoun_gender(const std::string& lower) {
  for (auto* p : kMasculinePronouns)
    if (lower == p) return Gender::Masculine;
  for (auto* p : kFemininePronouns)
    if (lower == p) return Gender::Feminine;
  return std::nullopt;
}

}  // namespace

RuleDetector::RuleDetector(std::size_t window) : window_(window) {
  for (auto* n : kRoleNouns) nouns_[n] = std::nullopt;
  for (auto* n : kGenericNouns) nouns_[n] = std::nullopt;
  for (auto* n : kMasculineNouns) nouns_[n] = Gender::Masculine;
  for (auto* n : kFeminineNouns) nouns_[n] = Gender::Feminine;
}

RuleDetector RuleDetector::from_file(const std::filesystem::path& path, std::size_t window) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noun list " + path.string());
  RuleDetector d(window);
  d.nouns_.clear();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto word = lowercase(line.substr(0, tab));
    const auto kind = tab == std::string::npos ? std::string() : line.substr(tab + 1);
    if (kind.empty() || kind == "generic")
      d.nouns_[word] = std::nullopt;
    else if (kind == "M")
      d.nouns_[word] = Gender::Masculine;
    else if (kind == "F")
      d.nouns_[word] = Gender::Feminine;
    else
      throw ConfigError("noun list line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
  }
  return d;
}

RuleDetector rule_detector(std::size_t window) { return RuleDetector(window); }

std::vector<TokenLabel> RuleDetector::annotate(const Tokens& tokens) const {
  const auto lower = lowercase(tokens);
  std::vector<TokenLabel> out(tokens.size(), TokenLabel::None);
  for (std::size_t i = 0; i < lower.size(); ++i) {
    auto it = nouns_.find(lower[i]);
    if (it == nouns_.end()) continue;
    if (it->second) {
      out[i] = *it->second == Gender::Masculine ? TokenLabel::Masculine : TokenLabel::Feminine;
      continue;
    }
    std::optional<std::size_t> best_dist;
    std::set<Gender> at_best;
    const std::size_t lo = i >= window_ ? i - window_ : 0;
    const std::size_t hi = std::min(lower.size() - 1, i + window_);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      auto g = pronoun_gender(lower[j]);
      if (!g) continue;
      if (j + 1 == i && is_possessive(lower[j])) continue;  // "his child": the possessor, not the child
      const std::size_t dist = j < i ? i - j : j - i;
      if (!best_dist || dist < *best_dist) {
        best_dist = dist;
        at_best = {*g};
      } else if (dist == *best_dist) {
        at_best.insert(*g);
      }
    }
    if (at_best.size() == 1)
      out[i] = *at_best.begin() == Gender::Masculine ? TokenLabel::Masculine : TokenLabel::Feminine;
    else
      out[i] = TokenLabel::Ambiguous;
  }
  return out;
}

std::vector<TokenLabel> AdapterDetector::annotate(const Tokens& tokens) const {
  const auto reply = transport_.call({{"x", tokens}});
  auto it = reply.find("labels");
  if (it == reply.end() || !it->is_array()) throw AdapterError("detector reply lacks a 'labels' array");
  if (it->size() != tokens.size())
    throw AdapterError("detector returned " + std::to_string(it->size()) + " labels for " +
                       std::to_string(tokens.size()) + " tokens");
  std::vector<TokenLabel> out;
  for (const auto& l : *it) {
    if (!l.is_string()) throw AdapterError("detector labels must be strings");
    out.push_back(parse_token_label(l.get<std::string>()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transformers

OracleTransformer::OracleTransformer(const StructuredTranslation& gold) : sides_(split(gold)) {}

LatticeTransformer::LatticeTransformer(const InflectionLexicon& lex, std::shared_ptr<const NgramModel> model,
                                       std::size_t beam)
    : lex_(lex), model_(std::move(model)), beam_(beam) {
  if (!model_) throw ConfigError("lattice transformer needs an n-gram model");
  if (beam_ == 0) throw ConfigError("beam width must be at least 1");
}

std::pair<PlainTranslation, PlainTranslation> LatticeTransformer::variants(const TaggedSource& x_m,
                                                                           const TaggedSource& x_f,
                                                                           const PlainTranslation& y_b) const {
  const NgramScorer base_m(model_, x_m.tokens);
  const NgramScorer base_f(model_, x_f.tokens);
  const LexiconGenderScorer scorer_m(base_m, lex_, x_m.tokens);
  const LexiconGenderScorer scorer_f(base_f, lex_, x_f.tokens);
  return make_variants(y_b, lex_, scorer_m, scorer_f, beam_);
}

std::vector<PromptExemplar> exemplars_from_corpus(const std::vector<GTransRecord>& corpus, std::size_t count) {
  std::vector<PromptExemplar> out;
  for (const auto& rec : corpus) {
    if (out.size() == count) break;
    if (!rec.target.has_structures()) continue;
    auto [m, f] = split(rec.target);
    PromptExemplar ex{rec.source.tokens, std::move(m), std::move(f), {}};
    for (auto e : rec.source.ambiguous_entities()) ex.ambiguous_heads.push_back(rec.source.entities[e].head_index);
    std::sort(ex.ambiguous_heads.begin(), ex.ambiguous_heads.end());
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

Tokens tag_heads(const Tokens& src, const std::vector<std::size_t>& heads, Gender g) {
  Tokens out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.push_back(src[i]);
    if (std::binary_search(heads.begin(), heads.end(), i)) out.emplace_back(g == Gender::Masculine ? kTagM : kTagF);
  }
  return out;
}

std::string prompt_from_tagged(const EditorAdapterConfig& cfg, const Tokens& tagged, const PlainTranslation& y_b,
                               Gender direction) {
  if (cfg.in_context_examples.empty()) throw ConfigError("prompt configuration needs at least one in-context example");
  const bool editor = cfg.preset == PromptPreset::Editor;
  std::ostringstream out;
  if (editor) {
    out << "Rewrite the base translation so that every source entity tagged <M> is referred to in the masculine "
           "and every entity tagged <F> in the feminine. Change only gender inflections and keep every other "
           "word as it is.\n\n";
  } else {
    out << "Translate the source sentence. Every source entity tagged <M> must be referred to in the masculine "
           "and every entity tagged <F> in the feminine.\n\n";
  }
  const Gender other = direction == Gender::Masculine ? Gender::Feminine : Gender::Masculine;
  for (const auto& ex : cfg.in_context_examples) {
    const auto& want = direction == Gender::Masculine ? ex.masculine : ex.feminine;
    const auto& base = other == Gender::Masculine ? ex.masculine : ex.feminine;
    out << "Source: " << join(tag_heads(ex.source, ex.ambiguous_heads, direction)) << '\n';
    if (editor) {
      out << "Base translation: " << join(base) << '\n';
      out << "Rewrite: " << join(want) << "\n\n";
    } else {
      out << "Translation: " << join(want) << "\n\n";
    }
  }
  out << "Source: " << join(tagged) << '\n';
  if (editor) {
    out << "Base translation: " << join(y_b) << '\n';
    out << "Rewrite:";
  } else {
    out << "Translation:";
  }
  return out.str();
}

PlainTranslation tokens_field(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_array()) throw AdapterError(std::string("adapter reply lacks a '") + field + "' array");
  PlainTranslation out;
  for (const auto& t : *it) {
    if (!t.is_string()) throw AdapterError(std::string("adapter field '") + field + "' must hold strings");
    out.push_back(t.get<std::string>());
    if (is_marker(out.back())) throw AdapterError(std::string("adapter field '") + field + "' contains a marker token");
  }
  return out;
}

}  // namespace

std::string build_editor_prompt(const EditorAdapterConfig& cfg, const AnnotatedSource& x, const PlainTranslation& y_b,
                                Gender direction) {
  const auto tagged = tag_source(x, uniform_assignment(x.ambiguous_entities(), direction));
  return prompt_from_tagged(cfg, tagged.tokens, y_b, direction);
}

AdapterTransformer::AdapterTransformer(JsonTransport& transport, std::optional<EditorAdapterConfig> prompts)
    : transport_(transport), prompts_(std::move(prompts)) {
  if (prompts_ && prompts_->in_context_examples.empty())
    throw ConfigError("prompt configuration needs at least one in-context example");
}

std::pair<PlainTranslation, PlainTranslation> AdapterTransformer::variants(const TaggedSource& x_m,
                                                                           const TaggedSource& x_f,
                                                                           const PlainTranslation& y_b) const {
  nlohmann::json req{{"xM", x_m.tokens}, {"xF", x_f.tokens}, {"yB", y_b}};
  if (prompts_) {
    req["promptM"] = prompt_from_tagged(*prompts_, x_m.tokens, y_b, Gender::Masculine);
    req["promptF"] = prompt_from_tagged(*prompts_, x_f.tokens, y_b, Gender::Feminine);
  }
  const auto reply = transport_.call(req);
  return {tokens_field(reply, "yM"), tokens_field(reply, "yF")};
}

// ---------------------------------------------------------------------------
// Aligners

AlignmentMap GoldAligner::align(const AnnotatedSource& x, const StructuredTranslation& ys) const {
  const auto gold = gold_.target.structures();
  std::vector<bool> used(gold.size(), false);
  AlignmentMap out;
  for (const auto& s : ys.structures()) {
    std::optional<std::size_t> hit;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (used[g] || !(gold[g] == s)) continue;
      used[g] = true;
      hit = g;
      break;
    }
    if (!hit) throw InvalidRecord("gold aligner: structure '" + join(s.masculine) + " | " + join(s.feminine) +
                                  "' not in the gold target");
    const auto head = gold_.source.entities.at(gold_.alignments.by_structure.at(*hit)).head_index;
    auto e = std::find_if(x.entities.begin(), x.entities.end(),
                          [&](const EntityAnnotation& a) { return a.head_index == head; });
    if (e == x.entities.end()) throw InvalidRecord("gold aligner: entity at token " + std::to_string(head) + " not detected");
    out.by_structure.push_back(static_cast<std::size_t>(e - x.entities.begin()));
  }
  return out;
}

AlignmentMap HeuristicAligner::align(const AnnotatedSource& x, const StructuredTranslation& ys) const {
  return heuristic_align(x, ys, hints_ ? &*hints_ : nullptr);
}

AlignmentMap AdapterAligner::align(const AnnotatedSource& x, const StructuredTranslation& ys) const {
  AlignmentMap out;
  for (const auto& ya : focus_views(ys)) {
    const auto reply = transport_.call({{"x", x.tokens}, {"yA", ya}});
    auto it = reply.find("aligned");
    if (it == reply.end() || !it->is_array()) throw AdapterError("aligner reply lacks an 'aligned' array");
    std::vector<int> aligned;
    for (const auto& v : *it) {
      if (!v.is_number_integer()) throw AdapterError("aligner labels must be 0 or 1");
      aligned.push_back(v.get<int>());
    }
    out.by_structure.push_back(entity_from_tagging(x, aligned));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Augmentation

const char* to_string(PassthroughReason r) {
  switch (r) {
    case PassthroughReason::NoAmbiguousEntity:
      return "no-ambiguous-entity";
    case PassthroughReason::Ungroupable:
      return "ungroupable";
    case PassthroughReason::NoStructures:
      return "no-structures";
  }
  return "?";
}

GTransRecord Passthrough::as_record() const { return {source, StructuredTranslation::plain(y_b), {}}; }

AnnotatedSource annotate_source(const Tokens& x, const std::vector<TokenLabel>& labels) {
  if (labels.size() != x.size())
    throw AdapterError("detector returned " + std::to_string(labels.size()) + " labels for " +
                       std::to_string(x.size()) + " tokens");
  AnnotatedSource src{x, {}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case TokenLabel::Ambiguous:
        src.entities.push_back({i, EntityLabel::Ambiguous});
        break;
      case TokenLabel::Masculine:
        src.entities.push_back({i, EntityLabel::Masculine});
        break;
      case TokenLabel::Feminine:
        src.entities.push_back({i, EntityLabel::Feminine});
        break;
      case TokenLabel::None:
        break;
    }
  }
  return src;
}

AugmentResult augment(const Tokens& x, const PlainTranslation& y_b, const Detector& detector,
                      const Transformer& transformer, const Aligner& aligner, const InflectionLexicon& lex) {
  auto src = annotate_source(x, detector.annotate(x));
  const auto ambiguous = src.ambiguous_entities();
  if (ambiguous.empty()) return Passthrough{std::move(src), y_b, PassthroughReason::NoAmbiguousEntity};

  const auto x_m = tag_source(src, uniform_assignment(ambiguous, Gender::Masculine));
  const auto x_f = tag_source(src, uniform_assignment(ambiguous, Gender::Feminine));
  const auto [y_m, y_f] = transformer.variants(x_m, x_f, y_b);
  for (const auto* side : {&y_m, &y_f})
    for (const auto& t : *side)
      if (is_marker(t)) throw AdapterError("transformer output contains marker token '" + t + "'");

  auto grouped = group(y_m, y_f, lex);
  if (std::holds_alternative<Ungroupable>(grouped)) return Passthrough{std::move(src), y_b, PassthroughReason::Ungroupable};
  auto& ys = std::get<StructuredTranslation>(grouped);
  if (!ys.has_structures()) return Passthrough{std::move(src), y_b, PassthroughReason::NoStructures};

  auto alignments = aligner.align(src, ys);
  GTransRecord rec{std::move(src), std::move(ys), std::move(alignments)};
  validate(rec);
  return rec;
}

AugmentInput augment_input_from_json(const nlohmann::json& j) {
  AugmentInput in;
  if (!j.is_object()) throw InvalidRecord("augment input must be a JSON object");
  const bool has_gold = j.contains("tgt");
  if (has_gold) {
    auto probe = j;
    if (!probe.contains("align")) probe["align"] = nlohmann::json::array();
    in.gold = gtrans_from_json(probe);
    in.src = in.gold->source.tokens;
  } else {
    in.src = source_from_json(j).tokens;
    if (j.contains("entities")) in.gold = GTransRecord{source_from_json(j), {}, {}};
  }
  if (auto it = j.find("yB"); it != j.end()) {
    if (!it->is_array()) throw InvalidRecord("field 'yB' must be an array of strings");
    for (const auto& t : *it) {
      if (!t.is_string()) throw InvalidRecord("field 'yB' must be an array of strings");
      in.y_b.push_back(t.get<std::string>());
      if (is_marker(in.y_b.back())) throw InvalidRecord("reserved marker token in 'yB'");
    }
  } else if (has_gold) {
    in.y_b = split(in.gold->target).first;
  } else {
    throw InvalidRecord("augment input needs 'yB' or 'tgt'");
  }
  return in;
}

std::vector<BatchOutcome> augment_batch(const std::vector<AugmentInput>& inputs, const ComponentFactory& factory,
                                        const InflectionLexicon& lex, std::size_t jobs) {
  std::vector<BatchOutcome> out(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      try {
        const auto det = factory.detector(inputs[i]);
        const auto tr = factory.transformer(inputs[i]);
        const auto al = factory.aligner(inputs[i]);
        out[i].result = augment(inputs[i].src, inputs[i].y_b, *det, *tr, *al, lex);
      } catch (const std::exception& e) {
        out[i].error = e.what();
        if (out[i].error.empty()) out[i].error = "unknown error";
      }
    }
  };
  const auto n = std::max<std::size_t>(1, std::min(jobs, inputs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace genderalt
