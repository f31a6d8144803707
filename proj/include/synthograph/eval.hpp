#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthograph/action_graph.hpp"
#include "synthograph/corpus.hpp"
#include "synthograph/labels.hpp"

namespace synthograph {

/// Counts with derived precision/recall/F1. A zero denominator yields 1 for
/// precision or recall; F1 is 0 when p + r = 0.
struct PRF {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  PRF& operator+=(const PRF& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const PRF&) const = default;
};

/// Harmonic mean; 0 when p + r = 0. Throws std::invalid_argument outside [0, 1].
double f1(double precision, double recall);

struct EntityScores {
  PRF overall;
  std::map<EntityLabel, PRF> per_label;
};

/// Exact (sent_id, start, end, label) matching; every unmatched prediction is a FP.
EntityScores entity_prf(std::span<const EntityMention> predicted, std::span<const EntityMention> gold);

struct NodeAlignment {
  std::map<int, int> pred_to_gold;
  int aligned_explicit = 0;
  int unaligned_explicit = 0;
  int implicit = 0;
  std::set<int> unmatched_gold;

  int total_predicted() const { return aligned_explicit + unaligned_explicit + implicit; }
  double aligned_fraction() const;
  double unaligned_fraction() const;
  double implicit_fraction() const;
  /// aligned / (aligned + unaligned) over explicit nodes only.
  double explicit_aligned_share() const;
};

/// aligned / (aligned + unaligned), as reported for explicit nodes.
double explicit_aligned_share(double aligned_fraction, double unaligned_fraction);

/// Aligns predicted explicit nodes to gold nodes with identical global token
/// sets; the earliest unmatched gold node (by event index) wins. Implicit
/// nodes are never aligned.
NodeAlignment align_nodes(const ActionGraph& predicted, const ActionGraph& gold, const TokenIndex& index);

enum class EdgeSetting { kIgnoreUnaligned = 1, kPenalizeUnaligned = 2 };

/// Association and reference edges scored together as directed pairs.
PRF edge_prf(const ActionGraph& predicted, const ActionGraph& gold, const NodeAlignment& alignment,
             EdgeSetting setting);
/// Integer form; throws std::invalid_argument unless setting is 1 or 2.
PRF edge_prf(const ActionGraph& predicted, const ActionGraph& gold, const NodeAlignment& alignment, int setting);

PRF micro_average(std::span<const PRF> counts);

/// Per-document graph evaluation.
struct GraphEvaluation {
  std::string doc_id;
  NodeAlignment alignment;
  PRF setting1;
  PRF setting2;
  std::optional<EntityScores> entities;
};

GraphEvaluation evaluate_graph(const std::string& doc_id, const ActionGraph& predicted, const ActionGraph& gold,
                               const TokenIndex& index);

struct EvaluationReport {
  std::vector<GraphEvaluation> documents;
  PRF micro_setting1;
  PRF micro_setting2;
  PRF micro_entities;
  bool has_entities = false;
  int aligned = 0;
  int unaligned = 0;
  int implicit = 0;
};

EvaluationReport summarize(std::vector<GraphEvaluation> documents);
nlohmann::json prf_to_json(const PRF& p);
nlohmann::json report_to_json(const EvaluationReport& r);
/// Human-readable table: Aligned | Unaligned | Setting 1 P R F1 | Setting 2 P R F1.
std::string format_report_table(const EvaluationReport& r, const std::string& model_name);

}  // namespace synthograph
