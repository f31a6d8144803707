#pragma once

// Test-only generators and brute-force oracles.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "synthograph/action_graph.hpp"
#include "synthograph/corpus.hpp"
#include "synthograph/labels.hpp"
#include "synthograph/origin.hpp"

namespace synth {

using Rng = std::mt19937_64;

struct Chain {
  Eigen::MatrixXd local;  // T x D
  Eigen::MatrixXd trans;  // D x D
};

Chain random_chain(Rng& rng, int T, int D, double scale = 2.0);

struct BruteForce {
  double best_score = 0;
  std::vector<std::vector<int>> best_paths;  // every path attaining best_score
  double log_z = 0;
};

/// Enumerates all D^T paths.
BruteForce brute_force(const Eigen::MatrixXd& local, const Eigen::MatrixXd& trans);

/// Central differences of f at x.
Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                 double h = 1e-5);

/// max |a - b| / max(1, |a|, |b|) componentwise.
double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Builds a sentence from "word|POS|head|label" items (head 1-based, 0 = root).
synthograph::Sentence parse(const std::string& spec, int sent_id = 0);

/// Sentences whose mentions are fully determined by word identity and the
/// neighbouring words. Every mention is followed and preceded by filler.
synthograph::Document separable_tagging_corpus(Rng& rng, int sentences);

/// Procedure whose gold reference edges all point to the previous operation.
/// Gold nodes follow the same construction rules as the extractor, so the
/// gold graph with edges stripped equals what the extractor produces from
/// the gold mentions.
synthograph::Document sequential_procedure(Rng& rng, const std::string& doc_id, int events);

/// Random parse trees and random (possibly odd) mention sets.
synthograph::Document random_document(Rng& rng, const std::string& doc_id);

/// Graphs drawn from a known origin process: every event after the first
/// has one intermediate whose head lemma names its origin operation with
/// probability `signal`.
struct OriginCorpus {
  std::vector<synthograph::ActionGraph> graphs;
  std::vector<synthograph::OriginAssignment> truth;  // sorted
};
OriginCorpus origin_corpus(Rng& rng, int procedures, double gamma, double signal);

}  // namespace synth
