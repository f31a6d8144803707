#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace synthograph {

/// The 18 entity types of the synthesis-procedure annotation scheme.
enum class EntityLabel : std::uint8_t {
  kTarget,
  kMaterial,
  kDescriptor,
  kAmtUnit,
  kCndMisc,
  kCndUnit,
  kIntermed,
  kOperation,
  kNumber,
  kAmtMisc,
  kPropUnit,
  kPropType,
  kPropMisc,
  kSynthAprt,
  kCharAprt,
  kBrand,
  kMeta,
  kRef,
};

inline constexpr int kNumEntityLabels = 18;

std::string_view label_name(EntityLabel label);
std::optional<EntityLabel> parse_label(std::string_view name);
EntityLabel label_from_index(int i);

enum class BilouPosition : std::uint8_t { kBegin = 0, kInside = 1, kLast = 2, kUnit = 3 };

using TagId = int;

/// Dense tag ids: 0 is O, then 1 + 4*label + position. 73 tags in all.
namespace tags {

inline constexpr TagId kOutside = 0;
inline constexpr int kCount = 1 + 4 * kNumEntityLabels;

constexpr TagId make(BilouPosition pos, EntityLabel label) {
  return 1 + 4 * static_cast<int>(label) + static_cast<int>(pos);
}
constexpr bool is_outside(TagId t) { return t == kOutside; }
constexpr BilouPosition position(TagId t) { return static_cast<BilouPosition>((t - 1) % 4); }
constexpr EntityLabel label(TagId t) { return static_cast<EntityLabel>((t - 1) / 4); }
constexpr bool valid(TagId t) { return t >= 0 && t < kCount; }

/// "O", "B-material", ...
std::string name(TagId t);
std::optional<TagId> parse(std::string_view name);

/// BILOU well-formedness of the transition prev → next.
bool transition_allowed(TagId prev, TagId next);
bool may_start(TagId t);
bool may_end(TagId t);

}  // namespace tags

/// A labeled token span inside one sentence; `end` is exclusive.
struct EntityMention {
  int sent_id = 0;
  int start = 0;
  int end = 0;
  EntityLabel label = EntityLabel::kMaterial;

  auto operator<=>(const EntityMention&) const = default;
};

}  // namespace synthograph
