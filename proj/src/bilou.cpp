#include "synthograph/bilou.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "synthograph/error.hpp"

namespace synthograph {

std::vector<TagId> bilou_encode(std::span<const EntityMention> mentions, int length) {
  std::vector<TagId> out(length, tags::kOutside);
  for (const auto& m : mentions) {
    if (m.start < 0 || m.end > length || m.start >= m.end)
      throw Error("mention [" + std::to_string(m.start) + "," + std::to_string(m.end) +
                  ") out of bounds for length " + std::to_string(length));
    for (int t = m.start; t < m.end; ++t) {
      if (out[t] != tags::kOutside) throw Error("overlapping mentions at token " + std::to_string(t));
    }
    if (m.end - m.start == 1) {
      out[m.start] = tags::make(BilouPosition::kUnit, m.label);
      continue;
    }
    out[m.start] = tags::make(BilouPosition::kBegin, m.label);
    for (int t = m.start + 1; t < m.end - 1; ++t) out[t] = tags::make(BilouPosition::kInside, m.label);
    out[m.end - 1] = tags::make(BilouPosition::kLast, m.label);
  }
  return out;
}

std::vector<EntityMention> bilou_decode(std::span<const TagId> tag_seq, int sent_id) {
  std::vector<EntityMention> out;
  struct Open {
    int start;
    EntityLabel label;
  };
  std::optional<Open> open;
  auto close_before = [&](int t) {
    if (open) out.push_back({sent_id, open->start, t, open->label});
    open.reset();
  };

  const int T = static_cast<int>(tag_seq.size());
  for (int t = 0; t < T; ++t) {
    const TagId tag = tag_seq[t];
    if (tags::is_outside(tag) || !tags::valid(tag)) {
      close_before(t);
      continue;
    }
    const EntityLabel label = tags::label(tag);
    const bool continues = open && open->label == label;
    switch (tags::position(tag)) {
      case BilouPosition::kUnit:
        close_before(t);
        out.push_back({sent_id, t, t + 1, label});
        break;
      case BilouPosition::kBegin:
        close_before(t);
        open = Open{t, label};
        break;
      case BilouPosition::kInside:
        if (!continues) {
          close_before(t);
          open = Open{t, label};
        }
        break;
      case BilouPosition::kLast:
        if (continues) {
          out.push_back({sent_id, open->start, t + 1, label});
          open.reset();
        } else {
          close_before(t);
          open = Open{t, label};
        }
        break;
    }
  }
  close_before(T);
  return out;
}

bool bilou_well_formed(std::span<const TagId> tag_seq) {
  if (tag_seq.empty()) return true;
  if (!std::all_of(tag_seq.begin(), tag_seq.end(), tags::valid)) return false;
  if (!tags::may_start(tag_seq.front()) || !tags::may_end(tag_seq.back())) return false;
  for (std::size_t t = 1; t < tag_seq.size(); ++t) {
    if (!tags::transition_allowed(tag_seq[t - 1], tag_seq[t])) return false;
  }
  return true;
}

}  // namespace synthograph
