#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace synthograph {

enum class NodeKind { kOperation, kArgument, kImplicit };
enum class SemType { kRawMaterial, kIntermediate, kApparatus };

std::string_view node_kind_name(NodeKind k);
std::string_view sem_type_name(SemType t);
std::optional<NodeKind> parse_node_kind(std::string_view s);
std::optional<SemType> parse_sem_type(std::string_view s);

/// Token range [start, end) of one sentence.
struct TokenSpan {
  int sent_id = 0;
  int start = 0;
  int end = 0;

  auto operator<=>(const TokenSpan&) const = default;
};

/// Lemma emitted by implicit nodes during edge induction.
inline constexpr std::string_view kImplicitLemma = "<implicit>";

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::kArgument;
  std::optional<SemType> sem_type;  // absent for operations
  std::optional<TokenSpan> span;    // absent for implicit nodes
  int event_index = 0;
  std::string lemma;                // head lemma; empty when unknown
  bool raw = false;                 // reference-needing node with no possible origin

  bool operator==(const Node&) const = default;
};

/// Operation `op_id` associated with one of its own argument spans (the 4-tuple).
struct AssociationEdge {
  int op_id = 0;
  int node_id = 0;

  auto operator<=>(const AssociationEdge&) const = default;
};

/// Argument node `node_id` originating from an earlier operation (the 5-tuple).
struct ReferenceEdge {
  int node_id = 0;
  int op_id = 0;
  SemType sem_type = SemType::kIntermediate;

  auto operator<=>(const ReferenceEdge&) const = default;
};

/// Node ids equal their position in `nodes`.
struct ActionGraph {
  std::vector<Node> nodes;
  std::vector<AssociationEdge> association_edges;
  std::vector<ReferenceEdge> reference_edges;

  int event_count() const;
  /// Operation node of event `e`, if that event has one.
  std::optional<int> operation_of_event(int e) const;

  bool operator==(const ActionGraph&) const = default;
};

/// Intermediate arguments and implicit nodes take a reference edge.
bool needs_reference(const Node& n);

/// Every invariant violation found, as human-readable strings. Empty means valid.
std::vector<std::string> graph_violations(const ActionGraph& g);
/// Throws ValidationError listing the first violation.
void validate_graph(const ActionGraph& g);

nlohmann::json graph_to_json(const ActionGraph& g);
/// Throws ParseError naming the offending field.
ActionGraph graph_from_json(const nlohmann::json& j, std::size_t line = 0);

}  // namespace synthograph
