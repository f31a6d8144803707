#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthograph/action_graph.hpp"
#include "synthograph/corpus.hpp"
#include "synthograph/diagnostics.hpp"
#include "synthograph/labels.hpp"

namespace synthograph {

/// A group of tokens of one sentence describing a single event.
struct EventPhrase {
  int sent_id = 0;
  std::vector<int> tokens;  // ascending
  int head = 0;

  bool operator==(const EventPhrase&) const = default;
};

struct EventArgument {
  SemType sem_type = SemType::kRawMaterial;
  std::optional<TokenSpan> span;  // absent for implicit arguments
  bool implicit = false;

  bool operator==(const EventArgument&) const = default;
};

/// An operation plus its typed arguments. Events with no operation are
/// kept and flagged degenerate.
struct Event {
  int sent_id = 0;
  int head = 0;
  std::optional<TokenSpan> operation;
  std::vector<EventArgument> arguments;
  bool degenerate = false;

  bool has(SemType t) const;
  bool operator==(const Event&) const = default;
};

/// True for "conj" and its subtypes ("conj:and").
bool is_conj_label(std::string_view label);

/// Splits off every conj dependent of the root (with its subtree) when the
/// sentence has more than one operation; the remaining tokens form the main
/// phrase. Phrases are ordered by head position.
std::vector<EventPhrase> split_sentence_events(const Sentence& sentence, int operation_count);

/// Semantic type an entity label maps to, or nullopt for labels that do not
/// become argument nodes (operation is handled separately).
std::optional<SemType> argument_type(EntityLabel label);

/// One event per phrase. A mention belongs to the phrase holding its start
/// token. Surplus operations in one phrase are dropped with a diagnostic.
std::vector<Event> build_events(std::span<const EventPhrase> phrases, std::span<const EntityMention> mentions,
                                Diagnostics* diag = nullptr, const std::string& doc_id = {});

/// Adds an implicit intermediate to every event after the first operation-bearing one that lacks
/// one and an implicit apparatus to every event that lacks one. Degenerate
/// events (no operation) are left untouched.
std::vector<Event> add_implicit_arguments(std::vector<Event> events);

/// Runs the three steps over the given sentences of a document.
std::vector<Event> extract_events(std::span<const Sentence> sentences, std::span<const EntityMention> mentions,
                                  Diagnostics* diag = nullptr, const std::string& doc_id = {});

}  // namespace synthograph
