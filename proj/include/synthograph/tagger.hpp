#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "synthograph/corpus.hpp"
#include "synthograph/crf.hpp"
#include "synthograph/features.hpp"
#include "synthograph/labels.hpp"

namespace synthograph {

/// Per-token softmax (tags independent given features) or linear-chain CRF.
enum class TaggerKind { kIndependent, kCrf };

std::string_view tagger_kind_name(TaggerKind k);
std::optional<TaggerKind> parse_tagger_kind(std::string_view s);

struct TaggerModel {
  FeatureVectorizer vectorizer;
  /// num_tags x vectorizer.width(); the trailing embedding_dimension()
  /// columns weight the dense embedding.
  Eigen::MatrixXd local;
  /// num_tags x num_tags, (prev, next). Unused for kIndependent.
  Eigen::MatrixXd transition;
  TaggerKind kind = TaggerKind::kCrf;
  /// Viterbi forbids ill-formed BILOU transitions. Only meaningful for the
  /// 73-tag alphabet.
  bool bilou_constraints = true;

  int num_tags() const { return static_cast<int>(local.rows()); }
  bool operator==(const TaggerModel& o) const {
    return vectorizer == o.vectorizer && local == o.local && transition == o.transition && kind == o.kind &&
           bilou_constraints == o.bilou_constraints;
  }
};

/// Zero-weight model of the given shape.
TaggerModel make_tagger_model(TaggerKind kind, FeatureVectorizer vectorizer, int num_tags = tags::kCount);

/// T x num_tags local scores.
Eigen::MatrixXd local_scores(const TaggerModel& model, const EncodedSentence& sentence);

/// Hard BILOU constraints over the 73-tag alphabet.
const crf::Constraints& bilou_constraints();

/// Per-token argmax of local scores; lowest tag id wins ties.
std::vector<TagId> predict_independent(const TaggerModel& model, const EncodedSentence& sentence);
/// log Z_x of the (unconstrained) chain.
double log_partition(const TaggerModel& model, const EncodedSentence& sentence);
/// Exact best path; honours `bilou_constraints` when set.
std::vector<TagId> viterbi_decode(const TaggerModel& model, const EncodedSentence& sentence);
/// Decodes with the rule matching the model kind.
std::vector<TagId> decode(const TaggerModel& model, const EncodedSentence& sentence);

struct TaggerConfig {
  double lambda = 0.1;
  int max_iterations = 200;
  double relative_tolerance = 1e-6;
};

struct TrainingReport {
  std::vector<double> objective_trace;
  int iterations = 0;
  std::string stop_reason;
};

/// Gold tags over an encoded sentence.
struct EncodedExample {
  EncodedSentence features;
  std::vector<TagId> tags;
};

/// Gold tags over raw features (before the vectorizer is frozen).
struct TaggedSentence {
  SentenceFeatures features;
  std::vector<TagId> tags;
};

/// Regularized negative log-likelihood of either factorization as a function
/// of the flat parameter vector [vec(local) ; vec(transition)] (column-major;
/// the transition block is absent for kIndependent).
class TaggerObjective {
 public:
  TaggerObjective(TaggerKind kind, int num_tags, int sparse_count, int embedding_dimension,
                  std::span<const EncodedExample> data, double lambda);

  int parameter_count() const;
  double operator()(const Eigen::VectorXd& params, Eigen::VectorXd& grad) const;
  double value(const Eigen::VectorXd& params) const;

  /// Copies the parameters into `model.local` / `model.transition`.
  void unpack(const Eigen::VectorXd& params, TaggerModel& model) const;
  Eigen::VectorXd pack(const TaggerModel& model) const;

 private:
  TaggerKind kind_;
  int num_tags_;
  int sparse_count_;
  int embedding_dimension_;
  std::span<const EncodedExample> data_;
  double lambda_;
};

/// Fits the vectorizer on the data, then minimizes the objective.
/// Throws on empty data; train_crf also throws on ill-formed gold sequences.
TaggerModel train_maxent(std::span<const TaggedSentence> data, const TaggerConfig& config = {},
                         TrainingReport* report = nullptr);
TaggerModel train_crf(std::span<const TaggedSentence> data, const TaggerConfig& config = {},
                      TrainingReport* report = nullptr);
TaggerModel train_tagger(TaggerKind kind, std::span<const TaggedSentence> data, const TaggerConfig& config = {},
                         TrainingReport* report = nullptr);

/// Training sentences from every document with gold mentions.
std::vector<TaggedSentence> tagged_sentences(std::span<const Document> docs, const LexiconSet& lex,
                                             const EmbeddingTable& emb);

/// extract_features -> decode -> bilou_decode.
std::vector<EntityMention> tag_mentions(const TaggerModel& model, const Sentence& sentence, const LexiconSet& lex,
                                        const EmbeddingTable& emb);

}  // namespace synthograph
