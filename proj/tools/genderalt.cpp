// genderalt: command-line front end for the entity-level gender alternatives toolkit.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "genderalt/adapters.hpp"
#include "genderalt/bitext.hpp"
#include "genderalt/corpus.hpp"
#include "genderalt/derive.hpp"
#include "genderalt/group.hpp"
#include "genderalt/lattice.hpp"
#include "genderalt/metrics.hpp"
#include "genderalt/pipeline.hpp"
#include "genderalt/service.hpp"

namespace ga = genderalt;

namespace {

constexpr int kOk = 0;
constexpr int kRecordErrors = 1;
constexpr int kUsage = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("genderalt");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("GENDERALT_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

std::vector<ga::Tokens> read_sentences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ga::ConfigError("cannot open " + path);
  std::vector<ga::Tokens> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = ga::split_ws(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

std::string assignment_text(const ga::GTransRecord& rec, const ga::GenderAssignment& g) {
  std::string out;
  for (const auto& [e, gender] : g) {
    if (!out.empty()) out += ' ';
    out += rec.source.tokens[rec.source.entities[e].head_index] + '=' + ga::gender_code(gender);
  }
  return out;
}

struct LmOptions {
  std::string path;
  std::size_t order = 3;
  double k = 0.1;

  std::shared_ptr<const ga::NgramModel> load() const {
    return std::make_shared<const ga::NgramModel>(read_sentences(path), order, k);
  }
};

void add_lm_options(CLI::App* cmd, LmOptions& lm, bool required) {
  auto* opt = cmd->add_option("--lm", lm.path, "target-side training text, one tokenized sentence per line");
  if (required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--order", lm.order, "n-gram order")->check(CLI::Range(1, 8));
  cmd->add_option("--smoothing", lm.k, "add-k smoothing constant")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------

int cmd_expand(const std::string& corpus, std::optional<std::size_t> only, bool json) {
  const auto recs = ga::read_gtrans_jsonl(corpus);
  int rc = kOk;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (only && *only != i) continue;
    try {
      const auto alts = ga::enumerate_alternatives(recs[i].target, recs[i].alignments, recs[i].source);
      for (const auto& alt : alts) {
        if (json) {
          nlohmann::json assignment = nlohmann::json::object();
          for (const auto& [e, g] : alt.assignment) assignment[std::to_string(e)] = std::string(1, ga::gender_code(g));
          std::cout << nlohmann::json{{"id", i}, {"assignment", assignment}, {"tgt", alt.translation}}.dump() << '\n';
        } else {
          std::cout << i << '\t' << assignment_text(recs[i], alt.assignment) << '\t' << ga::join(alt.translation)
                    << '\n';
        }
      }
    } catch (const ga::Error& e) {
      spdlog::error("record {}: {}", i, e.what());
      rc = kRecordErrors;
    }
  }
  if (only && *only >= recs.size()) {
    spdlog::error("record {} not in corpus ({} records)", *only, recs.size());
    return kRecordErrors;
  }
  return rc;
}

int cmd_group(const std::string& input, const std::string& lexicon, bool markers) {
  const auto lex = ga::InflectionLexicon::load(lexicon);
  std::ifstream in(input);
  if (!in) throw ga::ConfigError("cannot open " + input);
  std::string line;
  std::size_t lineno = 0;
  int rc = kOk;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      spdlog::error("line {}: expected 'masculine<TAB>feminine'", lineno);
      rc = kRecordErrors;
      continue;
    }
    try {
      const auto result = ga::group(ga::split_ws(line.substr(0, tab)), ga::split_ws(line.substr(tab + 1)), lex);
      if (const auto* u = std::get_if<ga::Ungroupable>(&result)) {
        spdlog::error("line {}: ungroupable span '{}' / '{}'", lineno, ga::join(u->masculine), ga::join(u->feminine));
        rc = kRecordErrors;
        continue;
      }
      const auto& ys = std::get<ga::StructuredTranslation>(result);
      if (markers)
        std::cout << ga::join(ga::serialize(ys).tokens) << '\n';
      else
        std::cout << ga::to_json(ys).dump() << '\n';
    } catch (const ga::Error& e) {
      spdlog::error("line {}: {}", lineno, e.what());
      rc = kRecordErrors;
    }
  }
  return rc;
}

int cmd_extract_bitext(const std::string& corpus, std::size_t max_extra, std::uint64_t seed) {
  const auto recs = ga::read_gtrans_jsonl(corpus);
  int rc = kOk;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    try {
      for (const auto& row : ga::extract_bitext(recs[i], max_extra, ga::record_seed(seed, i)))
        std::cout << ga::to_tsv(row) << '\n';
    } catch (const ga::Error& e) {
      spdlog::error("record {}: {}", i, e.what());
      rc = kRecordErrors;
    }
  }
  return rc;
}

struct AugmentOptions {
  std::string input;
  std::string detector = "rules";
  std::string transformer = "lattice";
  std::string aligner = "heuristic";
  std::string lexicon;
  std::string nouns;
  std::string hints;
  std::string prompt_preset;
  std::string exemplars;
  std::size_t exemplar_count = ga::EditorAdapterConfig::kDefaultExamples;
  std::size_t beam = 16;
  std::size_t jobs = 1;
  LmOptions lm;
};

bool is_endpoint(const std::string& s) { return s.rfind("cmd:", 0) == 0 || s.rfind("http://", 0) == 0; }

int cmd_augment(const AugmentOptions& o) {
  const auto lex = ga::InflectionLexicon::load(o.lexicon);

  std::vector<ga::AugmentInput> inputs;
  std::vector<std::string> input_errors;
  {
    std::ifstream in(o.input);
    if (!in) throw ga::ConfigError("cannot open " + o.input);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        inputs.push_back(ga::augment_input_from_json(nlohmann::json::parse(line)));
      } catch (const std::exception& e) {
        input_errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  for (const auto& e : input_errors) spdlog::error("{}", e);

  auto check_choice = [](const std::string& flag, const std::string& v, std::initializer_list<const char*> names) {
    if (is_endpoint(v)) return;
    for (const char* n : names)
      if (v == n) return;
    throw ga::ConfigError("unknown " + flag + " '" + v + "'");
  };
  check_choice("--detector", o.detector, {"gold", "rules"});
  check_choice("--transformer", o.transformer, {"oracle", "lattice"});
  check_choice("--aligner", o.aligner, {"gold", "heuristic"});

  const bool needs_gold = o.detector == "gold" || o.transformer == "oracle" || o.aligner == "gold";
  if (needs_gold)
    for (std::size_t i = 0; i < inputs.size(); ++i)
      if (!inputs[i].gold)
        throw ga::ConfigError("gold components need 'entities'/'tgt' on every input (input " + std::to_string(i) + ")");

  // Shared, thread-safe component state.
  std::shared_ptr<ga::JsonTransport> det_transport, tr_transport, al_transport;
  if (is_endpoint(o.detector)) det_transport = ga::make_transport(o.detector);
  if (is_endpoint(o.transformer)) tr_transport = ga::make_transport(o.transformer);
  if (is_endpoint(o.aligner)) al_transport = ga::make_transport(o.aligner);

  std::shared_ptr<const ga::RuleDetector> rules;
  if (o.detector == "rules")
    rules = std::make_shared<const ga::RuleDetector>(o.nouns.empty() ? ga::RuleDetector() : ga::RuleDetector::from_file(o.nouns));

  std::shared_ptr<const ga::NgramModel> model;
  if (o.transformer == "lattice") {
    if (o.lm.path.empty()) throw ga::ConfigError("--transformer lattice needs --lm");
    model = o.lm.load();
  }

  std::optional<ga::EditorAdapterConfig> prompts;
  if (!o.prompt_preset.empty()) {
    if (!tr_transport) throw ga::ConfigError("--prompt-preset needs an adapter transformer endpoint");
    if (o.exemplars.empty()) throw ga::ConfigError("--prompt-preset needs --exemplars");
    ga::EditorAdapterConfig cfg;
    cfg.endpoint = o.transformer;
    cfg.preset = o.prompt_preset == "generator" ? ga::PromptPreset::Generator : ga::PromptPreset::Editor;
    cfg.in_context_examples = ga::exemplars_from_corpus(ga::read_gtrans_jsonl(o.exemplars), o.exemplar_count);
    prompts = std::move(cfg);
  }

  std::optional<ga::BilingualHints> hints;
  if (!o.hints.empty()) hints = ga::BilingualHints::load(o.hints);

  ga::ComponentFactory factory;
  factory.detector = [&](const ga::AugmentInput& in) -> std::unique_ptr<ga::Detector> {
    if (o.detector == "gold") return std::make_unique<ga::GoldDetector>(in.gold->source);
    if (rules) return std::make_unique<ga::RuleDetector>(*rules);
    return std::make_unique<ga::AdapterDetector>(*det_transport);
  };
  factory.transformer = [&](const ga::AugmentInput& in) -> std::unique_ptr<ga::Transformer> {
    if (o.transformer == "oracle") return std::make_unique<ga::OracleTransformer>(in.gold->target);
    if (model) return std::make_unique<ga::LatticeTransformer>(lex, model, o.beam);
    return std::make_unique<ga::AdapterTransformer>(*tr_transport, prompts);
  };
  factory.aligner = [&](const ga::AugmentInput& in) -> std::unique_ptr<ga::Aligner> {
    if (o.aligner == "gold") return std::make_unique<ga::GoldAligner>(*in.gold);
    if (o.aligner == "heuristic") return std::make_unique<ga::HeuristicAligner>(hints);
    return std::make_unique<ga::AdapterAligner>(*al_transport);
  };

  const auto outcomes = ga::augment_batch(inputs, factory, lex, o.jobs);
  std::size_t records = 0, passthrough = 0, failed = input_errors.size();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& oc = outcomes[i];
    if (!oc.result) {
      spdlog::error("input {}: {}", i, oc.error);
      ++failed;
      continue;
    }
    if (const auto* rec = std::get_if<ga::GTransRecord>(&*oc.result)) {
      ++records;
      std::cout << ga::to_json(*rec).dump() << '\n';
    } else {
      const auto& p = std::get<ga::Passthrough>(*oc.result);
      ++passthrough;
      spdlog::info("input {}: passthrough ({})", i, ga::to_string(p.reason));
      std::cout << ga::to_json(p.as_record()).dump() << '\n';
    }
  }
  spdlog::info("{} records, {} passthrough, {} errors", records, passthrough, failed);
  return failed ? kRecordErrors : kOk;
}

int cmd_evaluate(const std::string& ref, const std::string& hyp, bool positional) {
  const auto pairs = ga::read_eval_pairs(ref, hyp);
  const auto report =
      ga::evaluate(pairs, positional ? ga::StructureMatching::Positional : ga::StructureMatching::Multiset);
  std::cout << ga::to_json(report).dump(2) << '\n';
  std::cerr << ga::format_table(report);
  return kOk;
}

int cmd_collapse(const std::string& corpus, const LmOptions& lm, bool consistent) {
  const auto recs = ga::read_gtrans_jsonl(corpus);
  const ga::NgramScorer scorer(lm.load());
  for (const auto& rec : recs) {
    const auto out = consistent ? ga::collapse_consistent(rec.target, rec.alignments, scorer)
                                : ga::collapse(rec.target, scorer);
    std::cout << ga::join(out) << '\n';
  }
  return kOk;
}

ga::Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const std::string& corpus, const std::string& lexicon, const LmOptions& lm, const std::string& host,
              int port) {
  auto recs = corpus.empty() ? std::vector<ga::GTransRecord>{} : ga::read_gtrans_jsonl(corpus);
  auto lex = lexicon.empty() ? ga::InflectionLexicon{} : ga::InflectionLexicon::load(lexicon);
  std::shared_ptr<const ga::NgramModel> model;
  if (!lm.path.empty()) model = lm.load();
  ga::Service service(std::move(recs), std::move(lex), model);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  spdlog::info("serving {} records on {}:{}", service.corpus().size(), host, port);
  std::thread ready([&] {
    if (service.wait_until_ready()) std::cerr << "listening on " << host << ':' << service.bound_port() << std::endl;
  });
  try {
    service.listen(host, port);
  } catch (...) {
    ready.join();
    g_service = nullptr;
    throw;
  }
  ready.join();
  g_service = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Entity-level gender alternatives for machine translation"};
  app.require_subcommand(1);

  std::string corpus, lexicon, input, ref, hyp;
  std::optional<std::size_t> only;
  bool json = false, markers = false, positional = false, consistent = false;
  std::size_t max_extra = 3;
  std::uint64_t seed = 0;
  LmOptions lm;
  AugmentOptions aug;
  std::string host = "127.0.0.1";
  int port = 8080;

  auto* expand = app.add_subcommand("expand", "print every entity-level alternative of each record");
  expand->add_option("--corpus", corpus, "G-Trans JSONL")->required()->check(CLI::ExistingFile);
  expand->add_option("--id", only, "only this record (0-based line index)");
  expand->add_flag("--json", json, "JSON lines instead of TSV");

  auto* grp = app.add_subcommand("group", "combine masculine/feminine translation pairs into structures");
  grp->add_option("--input", input, "TSV: masculine sentence TAB feminine sentence")->required()->check(CLI::ExistingFile);
  grp->add_option("--lexicon", lexicon, "inflection lexicon TSV")->required()->check(CLI::ExistingFile);
  grp->add_flag("--markers", markers, "print <BEG>/<MID>/<END> serialization instead of JSON");

  auto* bitext = app.add_subcommand("extract-bitext", "tagged-source/target fine-tuning pairs");
  bitext->add_option("--corpus", corpus, "G-Trans JSONL")->required()->check(CLI::ExistingFile);
  bitext->add_option("--max-extra", max_extra, "non-uniform assignments sampled per record");
  bitext->add_option("--seed", seed, "sampling seed");

  auto* augment = app.add_subcommand("augment", "detect, transform, group and align (x, yB) inputs");
  augment->add_option("--input", aug.input, "JSONL with 'src' and 'yB' (optionally gold fields)")
      ->required()
      ->check(CLI::ExistingFile);
  augment->add_option("--lexicon", aug.lexicon, "inflection lexicon TSV")->required()->check(CLI::ExistingFile);
  augment->add_option("--detector", aug.detector, "gold | rules | cmd:<command> | http://host:port/path");
  augment->add_option("--transformer", aug.transformer, "oracle | lattice | cmd:<command> | http://...");
  augment->add_option("--aligner", aug.aligner, "gold | heuristic | cmd:<command> | http://...");
  augment->add_option("--nouns", aug.nouns, "noun list for the rule detector")->check(CLI::ExistingFile);
  augment->add_option("--hints", aug.hints, "bilingual head-word hints for the heuristic aligner")
      ->check(CLI::ExistingFile);
  augment->add_option("--prompt-preset", aug.prompt_preset, "editor | generator (adapter transformer only)")
      ->check(CLI::IsMember({"editor", "generator"}));
  augment->add_option("--exemplars", aug.exemplars, "G-Trans JSONL providing in-context examples")
      ->check(CLI::ExistingFile);
  augment->add_option("--exemplar-count", aug.exemplar_count, "number of in-context examples");
  augment->add_option("--beam", aug.beam, "beam width for the lattice transformer")->check(CLI::PositiveNumber);
  augment->add_option("--jobs", aug.jobs, "parallel records")->check(CLI::PositiveNumber);
  add_lm_options(augment, aug.lm, false);

  auto* eval = app.add_subcommand("evaluate", "compare hypothesis records against references");
  eval->add_option("--ref", ref, "reference G-Trans JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--hyp", hyp, "hypothesis G-Trans JSONL")->required()->check(CLI::ExistingFile);
  eval->add_flag("--positional", positional, "match structures by position instead of as a multiset");

  auto* coll = app.add_subcommand("collapse", "pick one side per structure with a language model");
  coll->add_option("--corpus", corpus, "G-Trans JSONL")->required()->check(CLI::ExistingFile);
  coll->add_flag("--consistent", consistent, "one decision per aligned entity");
  add_lm_options(coll, lm, true);

  auto* serve = app.add_subcommand("serve", "HTTP API over a corpus");
  serve->add_option("--corpus", corpus, "G-Trans JSONL")->check(CLI::ExistingFile);
  serve->add_option("--lexicon", lexicon, "inflection lexicon TSV (for /augment)")->check(CLI::ExistingFile);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port")->check(CLI::Range(0, 65535));
  add_lm_options(serve, lm, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*expand) return cmd_expand(corpus, only, json);
    if (*grp) return cmd_group(input, lexicon, markers);
    if (*bitext) return cmd_extract_bitext(corpus, max_extra, seed);
    if (*augment) return cmd_augment(aug);
    if (*eval) return cmd_evaluate(ref, hyp, positional);
    if (*coll) return cmd_collapse(corpus, lm, consistent);
    if (*serve) return cmd_serve(corpus, lexicon, lm, host, port);
  } catch (const ga::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRecordErrors;
  }
  return kUsage;
}
