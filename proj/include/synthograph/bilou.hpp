#pragma once

#include <span>
#include <vector>

#include "synthograph/labels.hpp"

namespace synthograph {

/// Mentions must be in-bounds and non-overlapping; throws Error otherwise.
/// `sent_id` of the mentions is ignored.
std::vector<TagId> bilou_encode(std::span<const EntityMention> mentions, int length);

/// Total decoder. Stray I/L tags open a new segment; a segment still open at
/// a label change or at the end is closed on the previous token.
/// Returned mentions carry `sent_id`.
std::vector<EntityMention> bilou_decode(std::span<const TagId> tags, int sent_id = 0);

/// True when every transition (including start and end) is BILOU-legal.
bool bilou_well_formed(std::span<const TagId> tags);

}  // namespace synthograph
