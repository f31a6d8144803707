#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "synthograph/corpus.hpp"

namespace synthograph {

/// Binary paragraph features appended after the mean embedding:
/// operations-lexicon hit, digit, temperature unit, more than 40 tokens.
inline constexpr int kScreenerBinaryFeatures = 4;
inline constexpr int kScreenerSchemaVersion = 1;
inline constexpr int kLongParagraphTokens = 40;

/// Logistic-regression paragraph classifier.
struct ScreenerModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  int schema_version = kScreenerSchemaVersion;

  int embedding_dimension() const { return static_cast<int>(weights.size()) - kScreenerBinaryFeatures; }
  bool operator==(const ScreenerModel& o) const {
    return weights == o.weights && bias == o.bias && schema_version == o.schema_version;
  }
};

struct ScreenerExample {
  Eigen::VectorXd features;
  bool positive = false;
};

struct ScreenerConfig {
  double lambda = 0.1;
  int max_iterations = 500;
  double relative_tolerance = 1e-8;
};

/// True for degree signs and temperature unit tokens (°C, K, oC, ...).
bool is_temperature_unit(std::string_view token);

Eigen::VectorXd featurize_paragraph(std::span<const Sentence> paragraph, const EmbeddingTable& emb,
                                    const LexiconSet& lex);

/// Minimizes mean logistic loss + lambda/2 |w|^2 (bias unpenalized).
/// When `trace` is non-null it receives the objective after every accepted step.
ScreenerModel train_screener(std::span<const ScreenerExample> examples, const ScreenerConfig& config = {},
                             std::vector<double>* trace = nullptr);

double screener_probability(const ScreenerModel& model, const Eigen::VectorXd& features);

/// Indices of paragraphs with probability >= 0.5, in document order.
std::vector<std::size_t> select_synthesis_paragraphs(const Document& doc, const ScreenerModel& model,
                                                     const EmbeddingTable& emb, const LexiconSet& lex);

/// One example per labeled paragraph of every document that carries synthesis labels.
std::vector<ScreenerExample> screener_examples(std::span<const Document> docs, const EmbeddingTable& emb,
                                               const LexiconSet& lex);

}  // namespace synthograph
