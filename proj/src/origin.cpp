#include "synthograph/origin.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "synthograph/error.hpp"

namespace synthograph {

namespace {

constexpr double kGammaMin = 0.01;
constexpr double kGammaMax = 0.99;

// Operation node of each event index, per graph.
std::map<int, const Node*> operations_by_event(const ActionGraph& g) {
  std::map<int, const Node*> out;
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::kOperation) out.emplace(n.event_index, &n);
  }
  return out;
}

const std::string& arg_lemma(const Node& n) {
  static const std::string implicit(kImplicitLemma);
  static const std::string unknown(kUnknownLemma);
  if (n.kind == NodeKind::kImplicit) return implicit;
  return n.lemma.empty() ? unknown : n.lemma;
}

std::vector<std::string> build_vocabulary(std::span<const ActionGraph> graphs) {
  std::set<std::string> v{kUnknownLemma};
  for (const auto& g : graphs) {
    for (const auto& n : g.nodes) {
      if (needs_reference(n)) v.insert(arg_lemma(n));
    }
  }
  return {v.begin(), v.end()};
}

// E-step for one node: argmax over earlier operation-bearing events, ties to the latest.
int best_origin(const OriginModel& model, const Node& node, const std::map<int, const Node*>& ops) {
  int best = -1;
  double best_score = 0;
  for (auto it = ops.begin(); it != ops.end() && it->first < node.event_index; ++it) {
    const double s = model.score(node.event_index, it->first, it->second->lemma, arg_lemma(node));
    if (best < 0 || s >= best_score) {
      best = it->first;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

OriginModel OriginModel::uniform(double gamma) {
  OriginModel m;
  m.gamma = gamma;
  m.vocabulary = {kUnknownLemma};
  return m;
}

int OriginModel::vocabulary_index(const std::string& lemma) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), lemma);
  if (it != vocabulary.end() && *it == lemma) return static_cast<int>(it - vocabulary.begin());
  it = std::lower_bound(vocabulary.begin(), vocabulary.end(), std::string(kUnknownLemma));
  return static_cast<int>(it - vocabulary.begin());
}

double OriginModel::emission(const std::string& op_lemma, const std::string& lemma) const {
  auto row = emissions.find(op_lemma);
  if (row == emissions.end()) return 1.0 / static_cast<double>(std::max<std::size_t>(vocabulary.size(), 1));
  return row->second[vocabulary_index(lemma)];
}

double OriginModel::score(int node_event, int origin_event, const std::string& op_lemma,
                          const std::string& lemma) const {
  const int distance = node_event - 1 - origin_event;
  return std::log1p(-gamma) + distance * std::log(gamma) + std::log(emission(op_lemma, lemma));
}

bool OriginModel::operator==(const OriginModel& o) const {
  if (gamma != o.gamma || alpha != o.alpha || vocabulary != o.vocabulary || emissions.size() != o.emissions.size())
    return false;
  for (const auto& [k, v] : emissions) {
    auto it = o.emissions.find(k);
    if (it == o.emissions.end() || it->second != v) return false;
  }
  return true;
}

std::vector<OriginAssignment> sequential_assignments(std::span<const ActionGraph> graphs) {
  std::vector<OriginAssignment> out;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto ops = operations_by_event(graphs[g]);
    for (const auto& n : graphs[g].nodes) {
      if (!needs_reference(n)) continue;
      auto it = ops.lower_bound(n.event_index);
      if (it == ops.begin()) continue;
      out.push_back({g, n.id, std::prev(it)->first});
    }
  }
  return out;
}

OriginModel estimate_origin_model(std::span<const ActionGraph> graphs, std::span<const OriginAssignment> z,
                                  double alpha, const std::vector<std::string>& vocabulary) {
  OriginModel m;
  m.alpha = alpha;
  m.vocabulary = vocabulary;
  const auto V = static_cast<Eigen::Index>(vocabulary.size());

  std::vector<std::map<int, const Node*>> ops;
  for (const auto& g : graphs) ops.push_back(operations_by_event(g));

  std::map<std::string, Eigen::VectorXd> counts;
  double distance_sum = 0;
  for (const auto& a : z) {
    const Node& node = graphs[a.graph].nodes[a.node_id];
    const Node* op = ops[a.graph].at(a.origin_event);
    auto [it, fresh] = counts.try_emplace(op->lemma, Eigen::VectorXd::Zero(V));
    it->second[m.vocabulary_index(arg_lemma(node))] += 1.0;
    distance_sum += node.event_index - 1 - a.origin_event;
  }
  for (auto& [op, c] : counts) {
    const double total = c.sum();
    m.emissions[op] = ((c.array() + alpha) / (total + alpha * static_cast<double>(V))).matrix();
  }
  // Geometric MLE over d >= 0: gamma = mean / (1 + mean).
  const double mean = z.empty() ? 0.0 : distance_sum / static_cast<double>(z.size());
  m.gamma = std::clamp(mean / (1.0 + mean), kGammaMin, kGammaMax);
  return m;
}

double complete_data_loglik(const OriginModel& model, std::span<const ActionGraph> graphs,
                            std::span<const OriginAssignment> assignments) {
  double ll = 0;
  for (const auto& a : assignments) {
    if (a.graph >= graphs.size()) throw Error("assignment references missing graph " + std::to_string(a.graph));
    const ActionGraph& g = graphs[a.graph];
    if (a.node_id < 0 || a.node_id >= static_cast<int>(g.nodes.size()))
      throw Error("assignment references missing node " + std::to_string(a.node_id));
    const Node& node = g.nodes[a.node_id];
    if (!needs_reference(node)) throw Error("node " + std::to_string(a.node_id) + " does not take a reference edge");
    if (a.origin_event < 0 || a.origin_event >= node.event_index)
      throw Error("origin event " + std::to_string(a.origin_event) + " does not precede event " +
                  std::to_string(node.event_index));
    auto op = g.operation_of_event(a.origin_event);
    if (!op) throw Error("origin event " + std::to_string(a.origin_event) + " has no operation");
    ll += model.score(node.event_index, a.origin_event, g.nodes[*op].lemma, arg_lemma(node));
  }
  return ll;
}

OriginTraining train_origin_model(std::span<const ActionGraph> graphs, const OriginConfig& config) {
  OriginTraining out;
  out.assignments = sequential_assignments(graphs);
  if (out.assignments.empty()) throw Error("no reference-needing nodes with an earlier operation to train on");
  const auto vocabulary = build_vocabulary(graphs);

  std::vector<std::map<int, const Node*>> ops;
  for (const auto& g : graphs) ops.push_back(operations_by_event(g));

  out.model = estimate_origin_model(graphs, out.assignments, config.alpha, vocabulary);
  out.model.gamma = std::clamp(config.gamma_init, kGammaMin, kGammaMax);
  out.loglik_trace.push_back(complete_data_loglik(out.model, graphs, out.assignments));

  for (int it = 1; it <= config.max_iterations; ++it) {
    std::vector<OriginAssignment> next = out.assignments;
    for (auto& a : next) a.origin_event = best_origin(out.model, graphs[a.graph].nodes[a.node_id], ops[a.graph]);
    out.iterations = it;
    if (next == out.assignments) {
      out.converged = true;
      break;
    }
    out.assignments = std::move(next);
    out.model = estimate_origin_model(graphs, out.assignments, config.alpha, vocabulary);
    out.loglik_trace.push_back(complete_data_loglik(out.model, graphs, out.assignments));
  }
  return out;
}

ActionGraph apply_origin_model(const OriginModel& model, const ActionGraph& graph) {
  ActionGraph out = graph;
  out.reference_edges.clear();
  const auto ops = operations_by_event(graph);
  for (auto& n : out.nodes) {
    n.raw = false;
    if (!needs_reference(n)) continue;
    const int origin = best_origin(model, n, ops);
    if (origin < 0) {
      n.raw = true;
      continue;
    }
    out.reference_edges.push_back({n.id, ops.at(origin)->id, *n.sem_type});
  }
  return out;
}

}  // namespace synthograph
