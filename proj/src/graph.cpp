#include "synthograph/action_graph.hpp"
#include "synthograph/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "synthograph/error.hpp"

namespace synthograph {

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::kOperation: return "operation";
    case NodeKind::kArgument: return "argument";
    case NodeKind::kImplicit: return "implicit";
  }
  return "argument";
}

std::string_view sem_type_name(SemType t) {
  switch (t) {
    case SemType::kRawMaterial: return "raw-material";
    case SemType::kIntermediate: return "intermediate";
    case SemType::kApparatus: return "apparatus";
  }
  return "raw-material";
}

std::optional<NodeKind> parse_node_kind(std::string_view s) {
  if (s == "operation") return NodeKind::kOperation;
  if (s == "argument") return NodeKind::kArgument;
  if (s == "implicit") return NodeKind::kImplicit;
  return std::nullopt;
}

std::optional<SemType> parse_sem_type(std::string_view s) {
  if (s == "raw-material") return SemType::kRawMaterial;
  if (s == "intermediate") return SemType::kIntermediate;
  if (s == "apparatus") return SemType::kApparatus;
  return std::nullopt;
}

int ActionGraph::event_count() const {
  int n = 0;
  for (const auto& node : nodes) n = std::max(n, node.event_index + 1);
  return n;
}

std::optional<int> ActionGraph::operation_of_event(int e) const {
  for (const auto& node : nodes) {
    if (node.event_index == e && node.kind == NodeKind::kOperation) return node.id;
  }
  return std::nullopt;
}

bool needs_reference(const Node& n) {
  if (n.kind == NodeKind::kImplicit) return true;
  return n.kind == NodeKind::kArgument && n.sem_type == SemType::kIntermediate;
}

std::vector<std::string> graph_violations(const ActionGraph& g) {
  std::vector<std::string> out;
  const int n = static_cast<int>(g.nodes.size());
  auto valid_id = [n](int id) { return id >= 0 && id < n; };

  std::map<int, int> ops_per_event;
  for (int i = 0; i < n; ++i) {
    const Node& node = g.nodes[i];
    if (node.id != i) out.push_back("node at position " + std::to_string(i) + " has id " + std::to_string(node.id));
    if (node.event_index < 0) out.push_back("node " + std::to_string(i) + " has negative event index");
    switch (node.kind) {
      case NodeKind::kOperation:
        if (node.sem_type) out.push_back("operation node " + std::to_string(i) + " carries a semantic type");
        if (!node.span) out.push_back("operation node " + std::to_string(i) + " has no span");
        if (++ops_per_event[node.event_index] > 1)
          out.push_back("event " + std::to_string(node.event_index) + " has more than one operation");
        break;
      case NodeKind::kArgument:
        if (!node.sem_type) out.push_back("argument node " + std::to_string(i) + " lacks a semantic type");
        if (!node.span) out.push_back("argument node " + std::to_string(i) + " has no span");
        break;
      case NodeKind::kImplicit:
        if (!node.sem_type) out.push_back("implicit node " + std::to_string(i) + " lacks a semantic type");
        if (node.span) out.push_back("implicit node " + std::to_string(i) + " carries a span");
        break;
    }
    if (node.span && (node.span->start < 0 || node.span->end <= node.span->start))
      out.push_back("node " + std::to_string(i) + " has an empty or negative span");
  }

  for (const auto& e : g.association_edges) {
    if (!valid_id(e.op_id) || !valid_id(e.node_id)) {
      out.push_back("association edge references unknown node");
      continue;
    }
    const Node& op = g.nodes[e.op_id];
    const Node& arg = g.nodes[e.node_id];
    if (op.kind != NodeKind::kOperation)
      out.push_back("association edge source " + std::to_string(e.op_id) + " is not an operation");
    if (arg.kind == NodeKind::kOperation)
      out.push_back("association edge target " + std::to_string(e.node_id) + " is an operation");
    if (op.event_index != arg.event_index)
      out.push_back("association edge " + std::to_string(e.op_id) + "->" + std::to_string(e.node_id) +
                    " crosses events");
  }

  std::set<int> referenced;
  for (const auto& e : g.reference_edges) {
    if (!valid_id(e.op_id) || !valid_id(e.node_id)) {
      out.push_back("reference edge references unknown node");
      continue;
    }
    const Node& src = g.nodes[e.node_id];
    const Node& op = g.nodes[e.op_id];
    const std::string tag = std::to_string(e.node_id) + "->" + std::to_string(e.op_id);
    if (op.kind != NodeKind::kOperation) out.push_back("reference edge " + tag + " target is not an operation");
    if (!needs_reference(src)) out.push_back("reference edge " + tag + " leaves a raw-material or explicit apparatus node");
    if (op.event_index >= src.event_index) out.push_back("reference edge " + tag + " does not point backwards");
    if (src.sem_type && *src.sem_type != e.sem_type) out.push_back("reference edge " + tag + " semantic type mismatch");
    if (!referenced.insert(e.node_id).second)
      out.push_back("node " + std::to_string(e.node_id) + " has more than one reference edge");
    if (src.raw) out.push_back("node " + std::to_string(e.node_id) + " is flagged raw but has a reference edge");
  }
  return out;
}

void validate_graph(const ActionGraph& g) {
  auto v = graph_violations(g);
  if (!v.empty()) throw ValidationError("invalid action graph: " + v.front());
}

nlohmann::json graph_to_json(const ActionGraph& g) {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    json jn = {{"id", n.id}, {"kind", node_kind_name(n.kind)}};
    if (n.sem_type) jn["sem_type"] = sem_type_name(*n.sem_type);
    if (n.span) {
      jn["sent_id"] = n.span->sent_id;
      jn["start"] = n.span->start;
      jn["end"] = n.span->end;
    }
    jn["event_index"] = n.event_index;
    if (!n.lemma.empty()) jn["lemma"] = n.lemma;
    if (n.raw) jn["raw"] = true;
    nodes.push_back(std::move(jn));
  }
  json assoc = json::array();
  for (const auto& e : g.association_edges) assoc.push_back({e.op_id, e.node_id});
  json refs = json::array();
  for (const auto& e : g.reference_edges) refs.push_back({e.node_id, e.op_id, sem_type_name(e.sem_type)});
  return {{"nodes", std::move(nodes)}, {"association_edges", std::move(assoc)}, {"reference_edges", std::move(refs)}};
}

namespace {

int int_field(const nlohmann::json& j, const char* key, std::size_t line, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) throw ParseError(line, ctx + key, "expected integer");
  return j.at(key).get<int>();
}

}  // namespace

ActionGraph graph_from_json(const nlohmann::json& j, std::size_t line) {
  ActionGraph g;
  if (!j.is_object()) throw ParseError(line, "gold_graph", "expected object");
  if (!j.contains("nodes") || !j.at("nodes").is_array()) throw ParseError(line, "gold_graph.nodes", "expected array");
  for (const auto& jn : j.at("nodes")) {
    Node n;
    n.id = int_field(jn, "id", line, "gold_graph.nodes.");
    if (!jn.contains("kind") || !jn.at("kind").is_string()) throw ParseError(line, "gold_graph.nodes.kind", "expected string");
    auto kind = parse_node_kind(jn.at("kind").get<std::string>());
    if (!kind) throw ParseError(line, "gold_graph.nodes.kind", "unknown node kind");
    n.kind = *kind;
    if (jn.contains("sem_type")) {
      auto st = jn.at("sem_type").is_string() ? parse_sem_type(jn.at("sem_type").get<std::string>()) : std::nullopt;
      if (!st) throw ParseError(line, "gold_graph.nodes.sem_type", "unknown semantic type");
      n.sem_type = st;
    }
    if (jn.contains("start") || jn.contains("end") || jn.contains("sent_id")) {
      n.span = TokenSpan{int_field(jn, "sent_id", line, "gold_graph.nodes."), int_field(jn, "start", line, "gold_graph.nodes."),
                         int_field(jn, "end", line, "gold_graph.nodes.")};
    }
    n.event_index = int_field(jn, "event_index", line, "gold_graph.nodes.");
    if (jn.contains("lemma")) n.lemma = jn.at("lemma").get<std::string>();
    if (jn.contains("raw")) n.raw = jn.at("raw").get<bool>();
    g.nodes.push_back(std::move(n));
  }
  auto pairs = [&](const char* key) {
    std::vector<nlohmann::json> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw ParseError(line, std::string("gold_graph.") + key, "expected array");
    for (const auto& e : j.at(key)) out.push_back(e);
    return out;
  };
  for (const auto& e : pairs("association_edges")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError(line, "gold_graph.association_edges", "expected [op_id, node_id]");
    g.association_edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  for (const auto& e : pairs("reference_edges")) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() || !e[2].is_string())
      throw ParseError(line, "gold_graph.reference_edges", "expected [node_id, op_id, sem_type]");
    auto st = parse_sem_type(e[2].get<std::string>());
    if (!st) throw ParseError(line, "gold_graph.reference_edges", "unknown semantic type");
    g.reference_edges.push_back({e[0].get<int>(), e[1].get<int>(), *st});
  }
  return g;
}

}  // namespace synthograph

namespace synthograph {

ActionGraph assemble_graph(std::span<const Event> events, Diagnostics* diag, const std::string& doc_id) {
  ActionGraph g;
  auto add = [&g](Node n) {
    n.id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(n));
    return g.nodes.back().id;
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& ev = events[i];
    const int e = static_cast<int>(i);
    std::optional<int> op;
    if (ev.operation) {
      Node n;
      n.kind = NodeKind::kOperation;
      n.span = ev.operation;
      n.event_index = e;
      op = add(std::move(n));
    } else if (diag && !ev.arguments.empty()) {
      diag->warn("graph", "unattached_arguments", doc_id,
                 "event " + std::to_string(e) + " has " + std::to_string(ev.arguments.size()) +
                     " argument(s) but no operation");
    }
    for (const auto& a : ev.arguments) {
      Node n;
      n.kind = a.implicit ? NodeKind::kImplicit : NodeKind::kArgument;
      n.sem_type = a.sem_type;
      n.span = a.span;
      n.event_index = e;
      const int id = add(std::move(n));
      if (op) g.association_edges.push_back({*op, id});
    }
  }
  return g;
}

int span_head(const Sentence& sentence, const TokenSpan& span) {
  const auto depth = sentence.depths();
  int best = span.start;
  for (int t = span.start; t < span.end; ++t) {
    if (depth[t] < depth[best]) best = t;
  }
  return best;
}

void attach_head_lemmas(ActionGraph& graph, const Document& doc) {
  for (auto& n : graph.nodes) {
    if (n.kind == NodeKind::kImplicit) {
      n.lemma = kImplicitLemma;
      continue;
    }
    if (!n.span || n.span->sent_id < 0 || n.span->sent_id >= static_cast<int>(doc.sentences.size())) continue;
    const Sentence& s = doc.sentences[n.span->sent_id];
    n.lemma = to_lower(s.tokens[span_head(s, *n.span)].lemma);
  }
}

ActionGraph strip_reference_edges(ActionGraph graph) {
  graph.reference_edges.clear();
  for (auto& n : graph.nodes) n.raw = false;
  return graph;
}

ActionGraph induce_edges_sequential(const ActionGraph& graph) {
  ActionGraph out = strip_reference_edges(graph);
  std::map<int, int> op_of_event;
  for (const auto& n : out.nodes) {
    if (n.kind == NodeKind::kOperation) op_of_event.emplace(n.event_index, n.id);
  }
  for (auto& n : out.nodes) {
    if (!needs_reference(n)) continue;
    auto it = op_of_event.lower_bound(n.event_index);
    if (it == op_of_event.begin()) {
      n.raw = true;
      continue;
    }
    --it;
    out.reference_edges.push_back({n.id, it->second, *n.sem_type});
  }
  return out;
}

}  // namespace synthograph
