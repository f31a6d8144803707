#include "synthograph/tagger.hpp"

#include <algorithm>
#include <map>

#include "synthograph/bilou.hpp"
#include "synthograph/error.hpp"
#include "synthograph/optimize.hpp"

namespace synthograph {

std::string_view tagger_kind_name(TaggerKind k) { return k == TaggerKind::kCrf ? "crf" : "independent"; }

std::optional<TaggerKind> parse_tagger_kind(std::string_view s) {
  if (s == "crf") return TaggerKind::kCrf;
  if (s == "independent" || s == "maxent") return TaggerKind::kIndependent;
  return std::nullopt;
}

TaggerModel make_tagger_model(TaggerKind kind, FeatureVectorizer vectorizer, int num_tags) {
  TaggerModel m;
  m.local = Eigen::MatrixXd::Zero(num_tags, vectorizer.width());
  m.transition = Eigen::MatrixXd::Zero(num_tags, num_tags);
  m.vectorizer = std::move(vectorizer);
  m.kind = kind;
  m.bilou_constraints = num_tags == tags::kCount;
  return m;
}

namespace {

template <typename WeightMatrix>
Eigen::MatrixXd scores_from(const WeightMatrix& weights, int sparse_count, const EncodedSentence& s) {
  const int T = s.size();
  const int dim = static_cast<int>(weights.cols()) - sparse_count;
  Eigen::MatrixXd out(T, weights.rows());
  if (dim > 0) {
    out.noalias() = s.dense * weights.rightCols(dim).transpose();
  } else {
    out.setZero();
  }
  for (int t = 0; t < T; ++t) {
    for (int f : s.sparse[t]) out.row(t) += weights.col(f).transpose();
  }
  return out;
}

void require_kind(const TaggerModel& model, TaggerKind kind, const char* op) {
  if (model.kind != kind)
    throw Error(std::string(op) + " requires a " + std::string(tagger_kind_name(kind)) + " model, got " +
                std::string(tagger_kind_name(model.kind)));
}

}  // namespace

Eigen::MatrixXd local_scores(const TaggerModel& model, const EncodedSentence& sentence) {
  return scores_from(model.local, model.vectorizer.sparse_count(), sentence);
}

const crf::Constraints& bilou_constraints() {
  static const crf::Constraints c = [] {
    crf::Constraints k;
    k.allowed.resize(tags::kCount, tags::kCount);
    k.may_start.resize(tags::kCount);
    k.may_end.resize(tags::kCount);
    for (TagId i = 0; i < tags::kCount; ++i) {
      k.may_start[i] = tags::may_start(i);
      k.may_end[i] = tags::may_end(i);
      for (TagId j = 0; j < tags::kCount; ++j) k.allowed(i, j) = tags::transition_allowed(i, j);
    }
    return k;
  }();
  return c;
}

std::vector<TagId> predict_independent(const TaggerModel& model, const EncodedSentence& sentence) {
  require_kind(model, TaggerKind::kIndependent, "predict_independent");
  const Eigen::MatrixXd L = local_scores(model, sentence);
  std::vector<TagId> out(L.rows());
  for (Eigen::Index t = 0; t < L.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < L.cols(); ++j) {
      if (L(t, j) > L(t, best)) best = j;
    }
    out[t] = static_cast<TagId>(best);
  }
  return out;
}

double log_partition(const TaggerModel& model, const EncodedSentence& sentence) {
  require_kind(model, TaggerKind::kCrf, "log_partition");
  return crf::log_partition(local_scores(model, sentence), model.transition);
}

std::vector<TagId> viterbi_decode(const TaggerModel& model, const EncodedSentence& sentence) {
  require_kind(model, TaggerKind::kCrf, "viterbi_decode");
  const bool constrained = model.bilou_constraints && model.num_tags() == tags::kCount;
  auto result = crf::viterbi(local_scores(model, sentence), model.transition,
                             constrained ? &bilou_constraints() : nullptr);
  return result.path;
}

std::vector<TagId> decode(const TaggerModel& model, const EncodedSentence& sentence) {
  return model.kind == TaggerKind::kCrf ? viterbi_decode(model, sentence) : predict_independent(model, sentence);
}

// ---------------------------------------------------------------------------
// Objective

TaggerObjective::TaggerObjective(TaggerKind kind, int num_tags, int sparse_count, int embedding_dimension,
                                 std::span<const EncodedExample> data, double lambda)
    : kind_(kind),
      num_tags_(num_tags),
      sparse_count_(sparse_count),
      embedding_dimension_(embedding_dimension),
      data_(data),
      lambda_(lambda) {}

int TaggerObjective::parameter_count() const {
  const int local = num_tags_ * (sparse_count_ + embedding_dimension_);
  return kind_ == TaggerKind::kCrf ? local + num_tags_ * num_tags_ : local;
}

double TaggerObjective::value(const Eigen::VectorXd& params) const {
  Eigen::VectorXd scratch(params.size());
  return (*this)(params, scratch);
}

double TaggerObjective::operator()(const Eigen::VectorXd& params, Eigen::VectorXd& grad) const {
  const int D = num_tags_;
  const int width = sparse_count_ + embedding_dimension_;
  Eigen::Map<const Eigen::MatrixXd> W(params.data(), D, width);
  grad.setZero(params.size());
  Eigen::Map<Eigen::MatrixXd> GW(grad.data(), D, width);

  const bool chain = kind_ == TaggerKind::kCrf;
  Eigen::Map<const Eigen::MatrixXd> A(params.data() + (chain ? D * width : 0), chain ? D : 0, chain ? D : 0);
  Eigen::Map<Eigen::MatrixXd> GA(grad.data() + (chain ? D * width : 0), chain ? D : 0, chain ? D : 0);

  double nll = 0;
  for (const auto& ex : data_) {
    const int T = ex.features.size();
    if (T == 0) continue;
    const Eigen::MatrixXd L = scores_from(W, sparse_count_, ex.features);
    Eigen::MatrixXd G;
    if (chain) {
      auto fb = crf::forward_backward(L, A);
      nll += fb.log_z - crf::sequence_score(L, A, ex.tags);
      G = std::move(fb.node_marginals);
      GA += fb.transition_marginals;
      for (int t = 1; t < T; ++t) GA(ex.tags[t - 1], ex.tags[t]) -= 1.0;
    } else {
      G.resize(T, D);
      for (int t = 0; t < T; ++t) {
        const double lse = crf::log_sum_exp(L.row(t).transpose());
        nll += lse - L(t, ex.tags[t]);
        G.row(t) = (L.row(t).array() - lse).exp();
      }
    }
    for (int t = 0; t < T; ++t) {
      G(t, ex.tags[t]) -= 1.0;
      for (int f : ex.features.sparse[t]) GW.col(f) += G.row(t).transpose();
    }
    if (embedding_dimension_ > 0) GW.rightCols(embedding_dimension_).noalias() += G.transpose() * ex.features.dense;
  }
  grad += lambda_ * params;
  return nll + 0.5 * lambda_ * params.squaredNorm();
}

void TaggerObjective::unpack(const Eigen::VectorXd& params, TaggerModel& model) const {
  const int D = num_tags_;
  const int width = sparse_count_ + embedding_dimension_;
  model.local = Eigen::Map<const Eigen::MatrixXd>(params.data(), D, width);
  if (kind_ == TaggerKind::kCrf) {
    model.transition = Eigen::Map<const Eigen::MatrixXd>(params.data() + D * width, D, D);
  } else {
    model.transition = Eigen::MatrixXd::Zero(D, D);
  }
}

Eigen::VectorXd TaggerObjective::pack(const TaggerModel& model) const {
  Eigen::VectorXd p(parameter_count());
  const Eigen::Index n = model.local.size();
  p.head(n) = Eigen::Map<const Eigen::VectorXd>(model.local.data(), n);
  if (kind_ == TaggerKind::kCrf) p.tail(model.transition.size()) = Eigen::Map<const Eigen::VectorXd>(model.transition.data(), model.transition.size());
  return p;
}

// ---------------------------------------------------------------------------
// Training

TaggerModel train_tagger(TaggerKind kind, std::span<const TaggedSentence> data, const TaggerConfig& config,
                         TrainingReport* report) {
  if (data.empty()) throw Error("tagger training needs at least one sentence");
  std::vector<SentenceFeatures> feats;
  feats.reserve(data.size());
  int dim = -1;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    if (static_cast<int>(s.tags.size()) != s.features.size())
      throw Error("training sentence " + std::to_string(i) + " has mismatched tag and token counts");
    for (TagId t : s.tags) {
      if (!tags::valid(t)) throw Error("training sentence " + std::to_string(i) + " has an invalid tag id");
    }
    if (kind == TaggerKind::kCrf && !bilou_well_formed(s.tags))
      throw Error("training sentence " + std::to_string(i) + " has an ill-formed BILOU gold sequence");
    if (dim < 0) dim = static_cast<int>(s.features.dense.cols());
    if (dim != s.features.dense.cols()) throw Error("training sentences have inconsistent embedding widths");
    feats.push_back(s.features);
  }

  TaggerModel model = make_tagger_model(kind, FeatureVectorizer::fit(feats, dim));
  std::vector<EncodedExample> encoded;
  encoded.reserve(data.size());
  for (const auto& s : data) encoded.push_back({model.vectorizer.encode(s.features), s.tags});

  TaggerObjective objective(kind, model.num_tags(), model.vectorizer.sparse_count(), dim, encoded, config.lambda);
  OptimizerConfig oc;
  oc.max_iterations = config.max_iterations;
  oc.relative_tolerance = config.relative_tolerance;
  auto result = minimize(std::cref(objective), objective.pack(model), oc);
  objective.unpack(result.x, model);
  if (report) {
    report->objective_trace = result.trace;
    report->iterations = result.iterations;
    report->stop_reason = result.stop_reason;
  }
  return model;
}

TaggerModel train_maxent(std::span<const TaggedSentence> data, const TaggerConfig& config, TrainingReport* report) {
  return train_tagger(TaggerKind::kIndependent, data, config, report);
}

TaggerModel train_crf(std::span<const TaggedSentence> data, const TaggerConfig& config, TrainingReport* report) {
  return train_tagger(TaggerKind::kCrf, data, config, report);
}

std::vector<TaggedSentence> tagged_sentences(std::span<const Document> docs, const LexiconSet& lex,
                                             const EmbeddingTable& emb) {
  std::vector<TaggedSentence> out;
  for (const auto& doc : docs) {
    if (!doc.gold_mentions) continue;
    std::map<int, std::vector<EntityMention>> by_sentence;
    for (const auto& m : *doc.gold_mentions) by_sentence[m.sent_id].push_back(m);
    for (const auto& s : doc.sentences) {
      TaggedSentence ts;
      ts.features = extract_features(s, lex, emb);
      try {
        ts.tags = bilou_encode(by_sentence[s.sent_id], s.size());
      } catch (const Error& e) {
        throw Error("document '" + doc.doc_id + "' sentence " + std::to_string(s.sent_id) + ": " + e.what());
      }
      out.push_back(std::move(ts));
    }
  }
  return out;
}

std::vector<EntityMention> tag_mentions(const TaggerModel& model, const Sentence& sentence, const LexiconSet& lex,
                                        const EmbeddingTable& emb) {
  if (sentence.empty()) return {};
  const auto encoded = model.vectorizer.encode(extract_features(sentence, lex, emb));
  const auto path = decode(model, encoded);
  return bilou_decode(path, sentence.sent_id);
}

}  // namespace synthograph
