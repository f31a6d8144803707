#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "synthograph/corpus.hpp"

namespace synthograph {

/// Fired feature names per token plus the dense embedding rows (T x dim).
struct SentenceFeatures {
  std::vector<std::vector<std::string>> sparse;
  Eigen::MatrixXd dense;

  int size() const { return static_cast<int>(sparse.size()); }
};

/// Features mapped onto frozen ids; unseen names are dropped.
struct EncodedSentence {
  std::vector<std::vector<int>> sparse;
  Eigen::MatrixXd dense;

  int size() const { return static_cast<int>(sparse.size()); }
};

/// Collapsed character classes: U upper, L lower, D digit, P anything else.
/// "TiO2" -> "ULUD", "stirred" -> "L", "24" -> "D".
std::string word_shape(std::string_view word);
/// "lower", "initcap", "allcap", "mixed" or "none".
std::string capitalization_class(std::string_view word);

/// Feature templates, per token t:
///   bias; w[k]=lowercased surface for k in -2..2 (with <s>/</s> padding);
///   shape; prefixes and suffixes of length 1-3; has_digit; cap class;
///   pos[k] for k in -1..1; dep label; lemma; one lex= feature per lexicon
///   containing the surface or lemma. Dense part is the token embedding.
SentenceFeatures extract_features(const Sentence& sentence, const LexiconSet& lex, const EmbeddingTable& emb);

class FeatureVectorizer {
 public:
  FeatureVectorizer() = default;
  /// `names` become ids 0..n-1 in the order given.
  FeatureVectorizer(std::vector<std::string> names, int embedding_dimension);

  /// Collects every name seen in `data` and freezes ids in lexicographic order.
  static FeatureVectorizer fit(std::span<const SentenceFeatures> data, int embedding_dimension);

  std::optional<int> id(const std::string& name) const;
  EncodedSentence encode(const SentenceFeatures& features) const;

  int sparse_count() const { return static_cast<int>(names_.size()); }
  int embedding_dimension() const { return embedding_dimension_; }
  /// Columns of the local weight matrix: sparse features then the dense block.
  int width() const { return sparse_count() + embedding_dimension_; }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const FeatureVectorizer& o) const {
    return names_ == o.names_ && embedding_dimension_ == o.embedding_dimension_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  int embedding_dimension_ = 0;
};

}  // namespace synthograph
