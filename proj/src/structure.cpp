#include "genderalt/structure.hpp"

#include <string>

namespace genderalt {
namespace {

void check_side(const Tokens& side, const char* which) {
  if (side.empty()) throw InvalidRecord(std::string("gender structure has an empty ") + which + " side");
  for (const auto& t : side)
    if (is_marker(t)) throw InvalidRecord("marker token '" + t + "' inside a gender structure");
}

}  // namespace

StructuredTranslation::StructuredTranslation(std::vector<Segment> segments) : segments_(std::move(segments)) {
  for (const auto& seg : segments_) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      if (is_marker(*tok)) throw InvalidRecord("marker token '" + *tok + "' used as a plain token");
    } else {
      const auto& s = std::get<GenderStructure>(seg);
      check_side(s.masculine, "masculine");
      check_side(s.feminine, "feminine");
      if (s.masculine == s.feminine)
        throw InvalidRecord("gender structure has identical sides: '" + join(s.masculine) + "'");
      ++structure_count_;
    }
  }
}

StructuredTranslation StructuredTranslation::plain(const Tokens& toks) {
  std::vector<Segment> segs(toks.begin(), toks.end());
  return StructuredTranslation(std::move(segs));
}

std::vector<GenderStructure> StructuredTranslation::structures() const {
  std::vector<GenderStructure> out;
  out.reserve(structure_count_);
  for (const auto& seg : segments_)
    if (const auto* s = std::get_if<GenderStructure>(&seg)) out.push_back(*s);
  return out;
}

const char* to_string(MarkerError e) {
  switch (e) {
    case MarkerError::UnbalancedMarkers:
      return "UnbalancedMarkers";
    case MarkerError::NestedMarkers:
      return "NestedMarkers";
    case MarkerError::EmptySide:
      return "EmptySide";
    case MarkerError::StrayMarker:
      return "StrayMarker";
  }
  return "?";
}

MarkerParseError::MarkerParseError(MarkerError kind, std::size_t position)
    : Error(std::string(to_string(kind)) + " at token " + std::to_string(position)), kind_(kind), position_(position) {}

SerializedStructured serialize(const StructuredTranslation& ys) {
  SerializedStructured out;
  for (const auto& seg : ys.segments()) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      out.tokens.push_back(*tok);
      continue;
    }
    const auto& s = std::get<GenderStructure>(seg);
    out.tokens.emplace_back(kBeg);
    out.tokens.insert(out.tokens.end(), s.masculine.begin(), s.masculine.end());
    out.mid_positions.push_back(out.tokens.size());
    out.tokens.emplace_back(kMid);
    out.tokens.insert(out.tokens.end(), s.feminine.begin(), s.feminine.end());
    out.tokens.emplace_back(kEnd);
  }
  return out;
}

StructuredTranslation parse(const Tokens& tokens) {
  enum class State { Plain, Masculine, Feminine };
  std::vector<StructuredTranslation::Segment> segs;
  State state = State::Plain;
  GenderStructure cur;
  std::size_t open_at = 0;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t == kBeg) {
      if (state != State::Plain) throw MarkerParseError(MarkerError::NestedMarkers, i);
      state = State::Masculine;
      cur = {};
      open_at = i;
    } else if (t == kMid) {
      if (state == State::Plain) throw MarkerParseError(MarkerError::StrayMarker, i);
      if (state == State::Feminine) throw MarkerParseError(MarkerError::UnbalancedMarkers, i);
      if (cur.masculine.empty()) throw MarkerParseError(MarkerError::EmptySide, i);
      state = State::Feminine;
    } else if (t == kEnd) {
      if (state == State::Plain) throw MarkerParseError(MarkerError::StrayMarker, i);
      if (state == State::Masculine) throw MarkerParseError(MarkerError::UnbalancedMarkers, i);
      if (cur.feminine.empty()) throw MarkerParseError(MarkerError::EmptySide, i);
      segs.emplace_back(std::move(cur));
      cur = {};
      state = State::Plain;
    } else if (state == State::Plain) {
      segs.emplace_back(t);
    } else if (state == State::Masculine) {
      cur.masculine.push_back(t);
    } else {
      cur.feminine.push_back(t);
    }
  }
  if (state != State::Plain) throw MarkerParseError(MarkerError::UnbalancedMarkers, open_at);
  return StructuredTranslation(std::move(segs));
}

std::pair<PlainTranslation, PlainTranslation> split(const StructuredTranslation& ys) {
  std::pair<PlainTranslation, PlainTranslation> out;
  for (const auto& seg : ys.segments()) {
    if (const auto* tok = std::get_if<Token>(&seg)) {
      out.first.push_back(*tok);
      out.second.push_back(*tok);
    } else {
      const auto& s = std::get<GenderStructure>(seg);
      out.first.insert(out.first.end(), s.masculine.begin(), s.masculine.end());
      out.second.insert(out.second.end(), s.feminine.begin(), s.feminine.end());
    }
  }
  return out;
}

}  // namespace genderalt
