#include "synthograph/labels.hpp"

namespace synthograph {

namespace {

constexpr std::array<std::string_view, kNumEntityLabels> kLabelNames = {
    "target",    "material",  "descriptor", "amt_unit",   "cnd_misc",  "cnd_unit",
    "intermed",  "operation", "number",     "amt_misc",   "prop_unit", "prop_type",
    "prop_misc", "synth_aprt", "char_aprt", "brand",      "meta",      "ref",
};

constexpr std::string_view kPositionPrefix = "BILU";

}  // namespace

std::string_view label_name(EntityLabel label) { return kLabelNames[static_cast<int>(label)]; }

std::optional<EntityLabel> parse_label(std::string_view name) {
  for (int i = 0; i < kNumEntityLabels; ++i) {
    if (kLabelNames[i] == name) return static_cast<EntityLabel>(i);
  }
  return std::nullopt;
}

EntityLabel label_from_index(int i) { return static_cast<EntityLabel>(i); }

namespace tags {

std::string name(TagId t) {
  if (is_outside(t)) return "O";
  std::string out(1, kPositionPrefix[static_cast<int>(position(t))]);
  out += '-';
  out += label_name(label(t));
  return out;
}

std::optional<TagId> parse(std::string_view name) {
  if (name == "O") return kOutside;
  if (name.size() < 3 || name[1] != '-') return std::nullopt;
  auto p = kPositionPrefix.find(name[0]);
  auto l = parse_label(name.substr(2));
  if (p == std::string_view::npos || !l) return std::nullopt;
  return make(static_cast<BilouPosition>(p), *l);
}

bool transition_allowed(TagId prev, TagId next) {
  const bool prev_open = !is_outside(prev) && (position(prev) == BilouPosition::kBegin ||
                                               position(prev) == BilouPosition::kInside);
  const bool next_continues = !is_outside(next) && (position(next) == BilouPosition::kInside ||
                                                    position(next) == BilouPosition::kLast);
  if (prev_open) return next_continues && label(next) == label(prev);
  return !next_continues;
}

bool may_start(TagId t) {
  return is_outside(t) || position(t) == BilouPosition::kBegin || position(t) == BilouPosition::kUnit;
}

bool may_end(TagId t) {
  return is_outside(t) || position(t) == BilouPosition::kLast || position(t) == BilouPosition::kUnit;
}

}  // namespace tags

}  // namespace synthograph
