#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "genderalt/corpus.hpp"
#include "genderalt/structure.hpp"

namespace genderalt {

/// Row-stochastic m x n matrix (target position x source position), row-major.
class ScoreMatrix {
 public:
  /// Throws InvalidRecord unless every entry is in [0,1] and every row sums to 1 +- 1e-6.
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

struct LossConfig {
  double lambda = 0.05;
};

/// a_i = argmax_s P[m_i][s], ties to the smallest source index.
/// Throws InvalidRecord if a mid position is out of range or n != P.cols().
std::vector<std::size_t> infer_alignments(const ScoreMatrix& p, std::span<const std::size_t> mids, std::size_t n);

/// L = L_ce - (lambda / k) * sum_i log P[m_i][a_i].
/// Throws InvalidRecord on size mismatch, k = 0, negative lambda or a zero supervised cell.
double alignment_loss(const ScoreMatrix& p, std::span<const std::size_t> mids, std::span<const std::size_t> gold,
                      double l_ce, const LossConfig& cfg);

/// Source positions -> entity-list indices. Throws InvalidRecord if a position is not an
/// ambiguous head.
AlignmentMap alignments_from_positions(const AnnotatedSource& x, std::span<const std::size_t> positions);

/// One tagger input per structure: x, ";", then y_M with the i-th structure's masculine
/// phrase enclosed by "|" tokens. Throws InvalidRecord when y_S has no structures.
std::vector<Tokens> prepare_marker_inputs(const AnnotatedSource& x, const StructuredTranslation& ys);

/// Same, returning only the y_A part (what follows the separator).
std::vector<Tokens> focus_views(const StructuredTranslation& ys);

/// Source word -> target words that reveal the entity (e.g. judge -> juez, jueza).
/// Matching is on lowercased tokens.
class BilingualHints {
 public:
  void add(const std::string& source, const std::string& target);
  bool empty() const noexcept { return hints_.empty(); }
  bool matches(const std::string& source, const Tokens& phrase) const;
  /// TSV: source TAB target, one hint per line.
  static BilingualHints load(const std::string& path);

 private:
  std::map<std::string, std::set<std::string>> hints_;
};

/// Model-free aligner. Structures containing a hinted target word go to the first
/// ambiguous entity whose head word is hinted; the rest are assigned monotonically:
/// a structure opens a new region when its masculine side starts with a determiner or
/// preposition-article contraction, regions map to the remaining ambiguous entities in
/// head order, clamped to the last one. Throws InvalidRecord without ambiguous entities.
AlignmentMap heuristic_align(const AnnotatedSource& x, const StructuredTranslation& ys,
                             const BilingualHints* hints = nullptr);

/// Decode an aligner adapter response {"aligned": [0/1 per source token]} into the single
/// ambiguous entity whose head is marked. Throws AdapterError on zero or several marked heads.
std::size_t entity_from_tagging(const AnnotatedSource& x, const std::vector<int>& aligned);

}  // namespace genderalt
