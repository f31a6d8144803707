#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "synthograph/action_graph.hpp"

namespace synthograph {

/// Generative model of where reference-needing arguments come from:
///   P(origin = j | node in event i) ∝ (1 - gamma) * gamma^(i - 1 - j)
///   P(head lemma | operation lemma of event j)   add-alpha smoothed
/// Unknown operation lemmas emit uniformly; unknown argument lemmas map to
/// the reserved <unk> entry.
struct OriginModel {
  double gamma = 0.5;
  double alpha = 0.1;
  std::vector<std::string> vocabulary;  // sorted; always contains <unk>
  std::map<std::string, Eigen::VectorXd> emissions;  // op lemma -> probabilities over vocabulary

  /// Model whose emissions are uniform for every operation.
  static OriginModel uniform(double gamma);

  int vocabulary_index(const std::string& lemma) const;
  double emission(const std::string& op_lemma, const std::string& arg_lemma) const;
  /// log[(1-gamma) gamma^(i-1-j)] + log P(arg | op).
  double score(int node_event, int origin_event, const std::string& op_lemma, const std::string& arg_lemma) const;

  bool operator==(const OriginModel&) const;
};

inline constexpr const char* kUnknownLemma = "<unk>";

struct OriginConfig {
  double alpha = 0.1;
  double gamma_init = 0.5;
  int max_iterations = 50;
};

/// Latent origin of one reference-needing node: the event index of the
/// operation it came from.
struct OriginAssignment {
  std::size_t graph = 0;
  int node_id = 0;
  int origin_event = 0;

  auto operator<=>(const OriginAssignment&) const = default;
};

struct OriginTraining {
  OriginModel model;
  std::vector<OriginAssignment> assignments;
  /// complete_data_loglik after initialization, then after every M-step.
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
};

/// Hard EM from the sequential assignment. Throws when no graph has a
/// reference-needing node with an earlier operation.
OriginTraining train_origin_model(std::span<const ActionGraph> graphs, const OriginConfig& config = {});

/// Every reference-needing node with an earlier operation, initialized to the
/// nearest one.
std::vector<OriginAssignment> sequential_assignments(std::span<const ActionGraph> graphs);

/// Re-estimates parameters from hard assignments (gamma clamped to [0.01, 0.99]).
OriginModel estimate_origin_model(std::span<const ActionGraph> graphs, std::span<const OriginAssignment> z,
                                  double alpha, const std::vector<std::string>& vocabulary);

/// Sum of scores of the given assignments; throws on an invalid assignment.
double complete_data_loglik(const OriginModel& model, std::span<const ActionGraph> graphs,
                            std::span<const OriginAssignment> assignments);

/// Replaces reference edges with argmax origins (ties go to the latest event).
ActionGraph apply_origin_model(const OriginModel& model, const ActionGraph& graph);

}  // namespace synthograph
