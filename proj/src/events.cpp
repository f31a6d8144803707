#include "synthograph/events.hpp"

#include <algorithm>
#include <map>

namespace synthograph {

bool Event::has(SemType t) const {
  return std::any_of(arguments.begin(), arguments.end(), [t](const EventArgument& a) { return a.sem_type == t; });
}

bool is_conj_label(std::string_view label) { return label == "conj" || label.starts_with("conj:"); }

std::vector<EventPhrase> split_sentence_events(const Sentence& sentence, int operation_count) {
  std::vector<EventPhrase> out;
  if (sentence.empty()) return out;
  const int root = sentence.root();
  std::vector<int> all(sentence.size());
  for (int i = 0; i < sentence.size(); ++i) all[i] = i;
  if (operation_count <= 1) {
    out.push_back({sentence.sent_id, all, root});
    return out;
  }

  std::vector<bool> taken(sentence.size(), false);
  for (int i = 0; i < sentence.size(); ++i) {
    const Token& t = sentence.tokens[i];
    if (t.dep_head != root || !is_conj_label(t.dep_label)) continue;
    EventPhrase p{sentence.sent_id, sentence.subtree(i), i};
    for (int k : p.tokens) taken[k] = true;
    out.push_back(std::move(p));
  }
  EventPhrase main{sentence.sent_id, {}, root};
  for (int i = 0; i < sentence.size(); ++i) {
    if (!taken[i]) main.tokens.push_back(i);
  }
  out.push_back(std::move(main));
  std::sort(out.begin(), out.end(), [](const EventPhrase& a, const EventPhrase& b) { return a.head < b.head; });
  return out;
}

std::optional<SemType> argument_type(EntityLabel label) {
  switch (label) {
    case EntityLabel::kMaterial:
    case EntityLabel::kTarget: return SemType::kRawMaterial;
    case EntityLabel::kIntermed: return SemType::kIntermediate;
    case EntityLabel::kSynthAprt: return SemType::kApparatus;
    default: return std::nullopt;
  }
}

std::vector<Event> build_events(std::span<const EventPhrase> phrases, std::span<const EntityMention> mentions,
                                Diagnostics* diag, const std::string& doc_id) {
  std::vector<Event> events;
  events.reserve(phrases.size());
  // (sent_id, token) -> phrase index
  std::map<std::pair<int, int>, std::size_t> owner;
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    events.push_back({phrases[p].sent_id, phrases[p].head, std::nullopt, {}, false});
    for (int t : phrases[p].tokens) owner[{phrases[p].sent_id, t}] = p;
  }

  std::vector<EntityMention> sorted(mentions.begin(), mentions.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& m : sorted) {
    auto it = owner.find({m.sent_id, m.start});
    if (it == owner.end()) continue;
    Event& ev = events[it->second];
    const TokenSpan span{m.sent_id, m.start, m.end};
    if (m.label == EntityLabel::kOperation) {
      if (!ev.operation) {
        ev.operation = span;
      } else if (diag) {
        diag->warn("events", "dropped_operation", doc_id,
                   "sentence " + std::to_string(m.sent_id) + " tokens [" + std::to_string(m.start) + "," +
                       std::to_string(m.end) + ") is a second operation in one phrase");
      }
      continue;
    }
    if (auto type = argument_type(m.label)) ev.arguments.push_back({*type, span, false});
  }
  for (auto& ev : events) {
    ev.degenerate = !ev.operation;
    if (ev.degenerate && diag) {
      diag->warn("events", "degenerate_event", doc_id,
                 "phrase headed by sentence " + std::to_string(ev.sent_id) + " token " + std::to_string(ev.head) +
                     " has no operation");
    }
  }
  return events;
}

std::vector<Event> add_implicit_arguments(std::vector<Event> events) {
  bool after_first = false;
  for (Event& ev : events) {
    if (ev.degenerate) continue;
    if (after_first && !ev.has(SemType::kIntermediate))
      ev.arguments.push_back({SemType::kIntermediate, std::nullopt, true});
    if (!ev.has(SemType::kApparatus)) ev.arguments.push_back({SemType::kApparatus, std::nullopt, true});
    after_first = true;
  }
  return events;
}

std::vector<Event> extract_events(std::span<const Sentence> sentences, std::span<const EntityMention> mentions,
                                  Diagnostics* diag, const std::string& doc_id) {
  std::vector<EventPhrase> phrases;
  for (const auto& s : sentences) {
    const int ops = static_cast<int>(std::count_if(mentions.begin(), mentions.end(), [&](const EntityMention& m) {
      return m.sent_id == s.sent_id && m.label == EntityLabel::kOperation;
    }));
    auto p = split_sentence_events(s, ops);
    phrases.insert(phrases.end(), p.begin(), p.end());
  }
  return add_implicit_arguments(build_events(phrases, mentions, diag, doc_id));
}

}  // namespace synthograph
