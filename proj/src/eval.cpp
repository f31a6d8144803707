#include "synthograph/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <tuple>

namespace synthograph {

double PRF::precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }

double PRF::recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }

double PRF::f1() const { return synthograph::f1(precision(), recall()); }

double f1(double precision, double recall) {
  if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0))
    throw std::invalid_argument("precision and recall must lie in [0, 1]");
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

EntityScores entity_prf(std::span<const EntityMention> predicted, std::span<const EntityMention> gold) {
  EntityScores out;
  std::multiset<EntityMention> remaining(gold.begin(), gold.end());
  for (const auto& m : predicted) {
    auto it = remaining.find(m);
    if (it != remaining.end()) {
      remaining.erase(it);
      ++out.overall.tp;
      ++out.per_label[m.label].tp;
    } else {
      ++out.overall.fp;
      ++out.per_label[m.label].fp;
    }
  }
  for (const auto& m : remaining) {
    ++out.overall.fn;
    ++out.per_label[m.label].fn;
  }
  return out;
}

double NodeAlignment::aligned_fraction() const {
  return total_predicted() == 0 ? 0.0 : static_cast<double>(aligned_explicit) / total_predicted();
}

double NodeAlignment::unaligned_fraction() const {
  return total_predicted() == 0 ? 0.0 : static_cast<double>(unaligned_explicit) / total_predicted();
}

double NodeAlignment::implicit_fraction() const {
  return total_predicted() == 0 ? 0.0 : static_cast<double>(implicit) / total_predicted();
}

double NodeAlignment::explicit_aligned_share() const {
  const int explicit_nodes = aligned_explicit + unaligned_explicit;
  return explicit_nodes == 0 ? 0.0 : static_cast<double>(aligned_explicit) / explicit_nodes;
}

double explicit_aligned_share(double aligned_fraction, double unaligned_fraction) {
  const double d = aligned_fraction + unaligned_fraction;
  return d == 0.0 ? 0.0 : aligned_fraction / d;
}

NodeAlignment align_nodes(const ActionGraph& predicted, const ActionGraph& gold, const TokenIndex& index) {
  NodeAlignment out;
  // Global [begin, end) token range -> gold node ids ordered by (event, id).
  std::map<std::pair<int, int>, std::vector<int>> by_span;
  for (const auto& n : gold.nodes) {
    if (n.kind == NodeKind::kImplicit || !n.span) continue;
    by_span[{index.to_global(n.span->sent_id, n.span->start), index.to_global(n.span->sent_id, n.span->end)}].push_back(n.id);
  }
  for (auto& [span, ids] : by_span) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      return std::tie(gold.nodes[a].event_index, a) < std::tie(gold.nodes[b].event_index, b);
    });
  }
  std::set<int> matched;
  for (const auto& n : predicted.nodes) {
    if (n.kind == NodeKind::kImplicit || !n.span) {
      ++out.implicit;
      continue;
    }
    auto it = by_span.find({index.to_global(n.span->sent_id, n.span->start), index.to_global(n.span->sent_id, n.span->end)});
    bool aligned = false;
    if (it != by_span.end()) {
      for (int g : it->second) {
        if (matched.insert(g).second) {
          out.pred_to_gold[n.id] = g;
          aligned = true;
          break;
        }
      }
    }
    aligned ? ++out.aligned_explicit : ++out.unaligned_explicit;
  }
  for (const auto& n : gold.nodes) {
    if (!matched.count(n.id)) out.unmatched_gold.insert(n.id);
  }
  return out;
}

namespace {

std::vector<std::pair<int, int>> directed_edges(const ActionGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : g.association_edges) out.emplace_back(e.op_id, e.node_id);
  for (const auto& e : g.reference_edges) out.emplace_back(e.node_id, e.op_id);
  return out;
}

}  // namespace

PRF edge_prf(const ActionGraph& predicted, const ActionGraph& gold, const NodeAlignment& alignment,
             EdgeSetting setting) {
  PRF out;
  const bool penalize = setting == EdgeSetting::kPenalizeUnaligned;

  std::multiset<std::pair<int, int>> gold_open;
  for (const auto& e : directed_edges(gold)) {
    const bool in_scope = !alignment.unmatched_gold.count(e.first) && !alignment.unmatched_gold.count(e.second);
    if (in_scope) {
      gold_open.insert(e);
    } else if (penalize) {
      ++out.fn;
    }
  }
  for (const auto& [a, b] : directed_edges(predicted)) {
    auto ia = alignment.pred_to_gold.find(a);
    auto ib = alignment.pred_to_gold.find(b);
    if (ia == alignment.pred_to_gold.end() || ib == alignment.pred_to_gold.end()) {
      if (penalize) ++out.fp;
      continue;
    }
    auto it = gold_open.find({ia->second, ib->second});
    if (it != gold_open.end()) {
      gold_open.erase(it);
      ++out.tp;
    } else {
      ++out.fp;
    }
  }
  out.fn += static_cast<long>(gold_open.size());
  return out;
}

PRF edge_prf(const ActionGraph& predicted, const ActionGraph& gold, const NodeAlignment& alignment, int setting) {
  if (setting != 1 && setting != 2) throw std::invalid_argument("edge setting must be 1 or 2");
  return edge_prf(predicted, gold, alignment, static_cast<EdgeSetting>(setting));
}

PRF micro_average(std::span<const PRF> counts) {
  PRF out;
  for (const auto& c : counts) out += c;
  return out;
}

GraphEvaluation evaluate_graph(const std::string& doc_id, const ActionGraph& predicted, const ActionGraph& gold,
                               const TokenIndex& index) {
  GraphEvaluation ev;
  ev.doc_id = doc_id;
  ev.alignment = align_nodes(predicted, gold, index);
  ev.setting1 = edge_prf(predicted, gold, ev.alignment, EdgeSetting::kIgnoreUnaligned);
  ev.setting2 = edge_prf(predicted, gold, ev.alignment, EdgeSetting::kPenalizeUnaligned);
  return ev;
}

EvaluationReport summarize(std::vector<GraphEvaluation> documents) {
  EvaluationReport r;
  r.documents = std::move(documents);
  for (const auto& d : r.documents) {
    r.micro_setting1 += d.setting1;
    r.micro_setting2 += d.setting2;
    r.aligned += d.alignment.aligned_explicit;
    r.unaligned += d.alignment.unaligned_explicit;
    r.implicit += d.alignment.implicit;
    if (d.entities) {
      r.has_entities = true;
      r.micro_entities += d.entities->overall;
    }
  }
  return r;
}

nlohmann::json prf_to_json(const PRF& p) {
  return {{"tp", p.tp},
          {"fp", p.fp},
          {"fn", p.fn},
          {"precision", p.precision()},
          {"recall", p.recall()},
          {"f1", p.f1()}};
}

namespace {

nlohmann::json alignment_json(int aligned, int unaligned, int implicit) {
  const int total = aligned + unaligned + implicit;
  auto frac = [total](int n) { return total == 0 ? 0.0 : static_cast<double>(n) / total; };
  return {{"aligned", frac(aligned)},
          {"unaligned", frac(unaligned)},
          {"implicit", frac(implicit)},
          {"counts", {{"aligned", aligned}, {"unaligned", unaligned}, {"implicit", implicit}}}};
}

}  // namespace

nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : r.documents) {
    nlohmann::json jd = {{"doc_id", d.doc_id},
                         {"setting1", prf_to_json(d.setting1)},
                         {"setting2", prf_to_json(d.setting2)},
                         {"alignment", alignment_json(d.alignment.aligned_explicit, d.alignment.unaligned_explicit,
                                                      d.alignment.implicit)}};
    if (d.entities) {
      nlohmann::json per_label = nlohmann::json::object();
      for (const auto& [label, prf] : d.entities->per_label) per_label[std::string(label_name(label))] = prf_to_json(prf);
      jd["entities"] = {{"overall", prf_to_json(d.entities->overall)}, {"per_label", per_label}};
    }
    docs.push_back(std::move(jd));
  }
  nlohmann::json out = {{"per_document", std::move(docs)},
                        {"micro", {{"setting1", prf_to_json(r.micro_setting1)}, {"setting2", prf_to_json(r.micro_setting2)}}},
                        {"alignment", alignment_json(r.aligned, r.unaligned, r.implicit)}};
  if (r.has_entities) out["micro"]["entities"] = prf_to_json(r.micro_entities);
  return out;
}

std::string format_report_table(const EvaluationReport& r, const std::string& model_name) {
  const int total = r.aligned + r.unaligned + r.implicit;
  auto pct = [total](int n) { return total == 0 ? 0.0 : 100.0 * n / total; };
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-14s %9s %10s | %-26s | %-26s\n", "Model", "Aligned", "Unaligned", "Setting 1",
                "Setting 2");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-14s %9s %10s | %8s %8s %8s | %8s %8s %8s\n", "", "", "", "P", "R", "F1", "P",
                "R", "F1");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-14s %8.2f%% %9.2f%% | %8.2f %8.2f %8.2f | %8.2f %8.2f %8.2f\n",
                model_name.c_str(), pct(r.aligned), pct(r.unaligned), 100 * r.micro_setting1.precision(),
                100 * r.micro_setting1.recall(), 100 * r.micro_setting1.f1(), 100 * r.micro_setting2.precision(),
                100 * r.micro_setting2.recall(), 100 * r.micro_setting2.f1());
  out += buf;
  if (r.has_entities) {
    std::snprintf(buf, sizeof buf, "entities: P %.2f  R %.2f  F1 %.2f\n", 100 * r.micro_entities.precision(),
                  100 * r.micro_entities.recall(), 100 * r.micro_entities.f1());
    out += buf;
  }
  return out;
}

}  // namespace synthograph
