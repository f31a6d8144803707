#pragma once

#include <span>
#include <string>
#include <vector>

#include "synthograph/action_graph.hpp"
#include "synthograph/corpus.hpp"
#include "synthograph/diagnostics.hpp"
#include "synthograph/events.hpp"

namespace synthograph {

/// Nodes in event order (operation first, then arguments) with one
/// association edge per operation/argument pair. Arguments of an event that
/// has no operation stay unattached and a diagnostic is emitted.
ActionGraph assemble_graph(std::span<const Event> events, Diagnostics* diag = nullptr,
                           const std::string& doc_id = {});

/// Token of `span` closest to the dependency root (first on ties).
int span_head(const Sentence& sentence, const TokenSpan& span);

/// Fills Node::lemma with the lowercased lemma of each span's head token;
/// implicit nodes get the reserved implicit symbol.
void attach_head_lemmas(ActionGraph& graph, const Document& doc);

/// Removes every reference edge and raw flag.
ActionGraph strip_reference_edges(ActionGraph graph);

/// Links each reference-needing node to the operation of the nearest earlier
/// event that has one; nodes with no such event are flagged raw.
ActionGraph induce_edges_sequential(const ActionGraph& graph);

}  // namespace synthograph
