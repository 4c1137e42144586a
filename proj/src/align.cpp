#include "genderalt/align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "genderalt/kernels.hpp"

namespace genderalt {

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_)
    throw InvalidRecord("score matrix has " + std::to_string(values_.size()) + " entries, expected " +
                        std::to_string(rows_ * cols_));
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto st = k.row_stats(row(r));
    if (!(st.min >= 0.0) || !(st.max <= 1.0))
      throw InvalidRecord("score matrix row " + std::to_string(r) + " has entries outside [0, 1]");
    if (!(std::abs(st.sum - 1.0) <= 1e-6))
      throw InvalidRecord("score matrix row " + std::to_string(r) + " sums to " + std::to_string(st.sum));
  }
}

std::vector<std::size_t> infer_alignments(const ScoreMatrix& p, std::span<const std::size_t> mids, std::size_t n) {
  if (n != p.cols())
    throw InvalidRecord("source length " + std::to_string(n) + " does not match score matrix width " +
                        std::to_string(p.cols()));
  if (n == 0) throw InvalidRecord("cannot align against an empty source");
  const auto& k = kernels::active();
  std::vector<std::size_t> out;
  out.reserve(mids.size());
  for (auto m : mids) {
    if (m >= p.rows())
      throw InvalidRecord("MID position " + std::to_string(m) + " outside score matrix with " +
                          std::to_string(p.rows()) + " rows");
    out.push_back(k.argmax(p.row(m)));
  }
  return out;
}

double alignment_loss(const ScoreMatrix& p, std::span<const std::size_t> mids, std::span<const std::size_t> gold,
                      double l_ce, const LossConfig& cfg) {
  if (mids.size() != gold.size()) throw InvalidRecord("alignment loss needs one gold entity per MID position");
  if (mids.empty()) throw InvalidRecord("alignment loss needs at least one structure");
  if (!(cfg.lambda >= 0.0)) throw InvalidRecord("lambda must be non-negative");

  // Flat indices of the supervised cells P[m_i][a_i].
  std::vector<std::size_t> cells;
  cells.reserve(mids.size());
  for (std::size_t i = 0; i < mids.size(); ++i) {
    if (mids[i] >= p.rows() || gold[i] >= p.cols())
      throw InvalidRecord("supervised cell (" + std::to_string(mids[i]) + ", " + std::to_string(gold[i]) +
                          ") outside score matrix");
    if (p.at(mids[i], gold[i]) <= 0.0)
      throw InvalidRecord("zero attention probability at supervised cell (" + std::to_string(mids[i]) + ", " +
                          std::to_string(gold[i]) + ")");
    cells.push_back(mids[i] * p.cols() + gold[i]);
  }
  std::span<const double> all(&p.row(0)[0], p.rows() * p.cols());
  const double log_sum = kernels::active().gather_log_sum(all, cells);
  return l_ce - (cfg.lambda / static_cast<double>(mids.size())) * log_sum;
}

AlignmentMap alignments_from_positions(const AnnotatedSource& x, std::span<const std::size_t> positions) {
  AlignmentMap out;
  for (auto pos : positions) {
    bool found = false;
    for (std::size_t e = 0; e < x.entities.size(); ++e) {
      if (x.entities[e].head_index != pos) continue;
      if (x.entities[e].label != EntityLabel::Ambiguous)
        throw InvalidRecord("source position " + std::to_string(pos) + " is not an ambiguous entity head");
      out.by_structure.push_back(e);
      found = true;
      break;
    }
    if (!found) throw InvalidRecord("source position " + std::to_string(pos) + " is not an entity head");
  }
  return out;
}

std::vector<Tokens> focus_views(const StructuredTranslation& ys) {
  const auto k = ys.structure_count();
  if (k == 0) throw InvalidRecord("marker inputs need at least one gender structure");
  std::vector<Tokens> out(k);
  for (std::size_t target = 0; target < k; ++target) {
    auto& ya = out[target];
    std::size_t si = 0;
    for (const auto& seg : ys.segments()) {
      if (const auto* tok = std::get_if<Token>(&seg)) {
        ya.push_back(*tok);
        continue;
      }
      const auto& m = std::get<GenderStructure>(seg).masculine;
      if (si == target) ya.emplace_back(kFocusMarker);
      ya.insert(ya.end(), m.begin(), m.end());
      if (si == target) ya.emplace_back(kFocusMarker);
      ++si;
    }
  }
  return out;
}

std::vector<Tokens> prepare_marker_inputs(const AnnotatedSource& x, const StructuredTranslation& ys) {
  auto views = focus_views(ys);
  std::vector<Tokens> out;
  out.reserve(views.size());
  for (auto& ya : views) {
    Tokens seq = x.tokens;
    seq.emplace_back(kConcatSeparator);
    seq.insert(seq.end(), ya.begin(), ya.end());
    out.push_back(std::move(seq));
  }
  return out;
}

void BilingualHints::add(const std::string& source, const std::string& target) {
  hints_[lowercase(source)].insert(lowercase(target));
}

bool BilingualHints::matches(const std::string& source, const Tokens& phrase) const {
  auto it = hints_.find(lowercase(source));
  if (it == hints_.end()) return false;
  for (const auto& t : phrase)
    if (it->second.count(lowercase(t))) return true;
  return false;
}

BilingualHints BilingualHints::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open hint file " + path);
  BilingualHints h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ConfigError("hint line " + std::to_string(lineno) + ": expected 'source<TAB>target'");
    h.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return h;
}

namespace {

// Phrase openers that start a new noun phrase in the Romance and Germanic targets we see.
bool opens_region(const Token& first) {
  static const std::set<std::string> openers{
      "el",  "la",  "los", "las", "un",  "una", "unos", "unas", "del",  "al",   "le",  "les",
      "une", "des", "du",  "au",  "aux", "il",  "lo",   "gli",  "uno",  "dello", "della", "dal",
      "dalla", "o", "os", "as", "um", "uma", "do", "da", "ao", "à",   "der", "die",  "das", "den",
      "dem", "ein", "eine", "einen", "einem", "einer", "mi", "tu", "su", "nuestro", "nuestra"};
  return openers.count(lowercase(first)) > 0;
}

}  // namespace

AlignmentMap heuristic_align(const AnnotatedSource& x, const StructuredTranslation& ys, const BilingualHints* hints) {
  const auto ambiguous = [&] {
    auto a = x.ambiguous_entities();
    std::stable_sort(a.begin(), a.end(), [&](std::size_t l, std::size_t r) {
      return x.entities[l].head_index < x.entities[r].head_index;
    });
    return a;
  }();
  if (ambiguous.empty()) throw InvalidRecord("no ambiguous entity to align structures to");

  const auto structures = ys.structures();
  std::vector<std::optional<std::size_t>> assigned(structures.size());
  std::set<std::size_t> hinted;
  if (hints && !hints->empty()) {
    for (std::size_t i = 0; i < structures.size(); ++i) {
      for (auto e : ambiguous) {
        const auto& head = x.tokens[x.entities[e].head_index];
        if (hints->matches(head, structures[i].masculine) || hints->matches(head, structures[i].feminine)) {
          assigned[i] = e;
          hinted.insert(e);
          break;
        }
      }
    }
  }

  std::vector<std::size_t> pool;
  for (auto e : ambiguous)
    if (!hinted.count(e)) pool.push_back(e);
  if (pool.empty()) pool = ambiguous;

  AlignmentMap out;
  std::optional<std::size_t> region;
  for (std::size_t i = 0; i < structures.size(); ++i) {
    if (!assigned[i]) {
      if (!region)
        region = 0;
      else if (opens_region(structures[i].masculine.front()))
        ++*region;
      assigned[i] = pool[std::min(*region, pool.size() - 1)];
    }
    out.by_structure.push_back(*assigned[i]);
  }
  return out;
}

std::size_t entity_from_tagging(const AnnotatedSource& x, const std::vector<int>& aligned) {
  if (aligned.size() != x.tokens.size())
    throw AdapterError("aligner returned " + std::to_string(aligned.size()) + " labels for " +
                       std::to_string(x.tokens.size()) + " source tokens");
  std::optional<std::size_t> hit;
  for (std::size_t e = 0; e < x.entities.size(); ++e) {
    if (x.entities[e].label != EntityLabel::Ambiguous || aligned[x.entities[e].head_index] == 0) continue;
    if (hit) throw AdapterError("aligner marked more than one ambiguous head");
    hit = e;
  }
  if (!hit) throw AdapterError("aligner marked no ambiguous head");
  return *hit;
}

}  // namespace genderalt
