#include <doctest.h>

#include "support/synthetic.hpp"
#include "synthograph/bilou.hpp"
#include "synthograph/error.hpp"
#include "synthograph/eval.hpp"
#include "synthograph/tagger.hpp"

using namespace synthograph;

namespace {

std::vector<EncodedExample> random_examples(synth::Rng& rng, int n, int D, int sparse, int dim) {
  std::vector<EncodedExample> out;
  std::normal_distribution<double> g(0, 1);
  for (int i = 0; i < n; ++i) {
    const int T = std::uniform_int_distribution<int>(1, 5)(rng);
    EncodedExample ex;
    ex.features.sparse.resize(T);
    ex.features.dense.resize(T, dim);
    for (int t = 0; t < T; ++t) {
      for (int f = 0; f < sparse; ++f)
        if (std::bernoulli_distribution(0.4)(rng)) ex.features.sparse[t].push_back(f);
      for (int d = 0; d < dim; ++d) ex.features.dense(t, d) = g(rng);
      ex.tags.push_back(std::uniform_int_distribution<int>(0, D - 1)(rng));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

double check_gradient(TaggerKind kind, synth::Rng& rng, int D, int sparse, int dim) {
  const auto data = random_examples(rng, 3, D, sparse, dim);
  TaggerObjective obj(kind, D, sparse, dim, data, 0.3);
  Eigen::VectorXd x(obj.parameter_count());
  std::normal_distribution<double> g(0, 0.5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = g(rng);
  Eigen::VectorXd grad(x.size());
  obj(x, grad);
  const auto numeric = synth::numeric_gradient([&](const Eigen::VectorXd& y) { return obj.value(y); }, x);
  return synth::max_relative_error(grad, numeric);
}

}  // namespace

TEST_CASE("gradients match central differences") {
  synth::Rng rng(21);
  for (int rep = 0; rep < 4; ++rep) {
    CHECK(check_gradient(TaggerKind::kCrf, rng, 5, 4, 2) < 1e-4);
    CHECK(check_gradient(TaggerKind::kIndependent, rng, 5, 4, 2) < 1e-4);
  }
  // the 3-token, 5-tag instance
  EncodedExample ex;
  ex.features.sparse = {{0, 1}, {1}, {2}};
  ex.features.dense = Eigen::MatrixXd::Zero(3, 0);
  ex.tags = {1, 4, 2};
  TaggerObjective obj(TaggerKind::kCrf, 5, 3, 0, std::span<const EncodedExample>(&ex, 1), 0.1);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(obj.parameter_count(), -1, 1);
  Eigen::VectorXd grad(x.size());
  obj(x, grad);
  const auto numeric = synth::numeric_gradient([&](const Eigen::VectorXd& y) { return obj.value(y); }, x);
  CHECK(synth::max_relative_error(grad, numeric) < 1e-4);
}

TEST_CASE("zero weights predict tag 0 everywhere") {
  FeatureVectorizer v({"a", "b"}, 0);
  const auto m = make_tagger_model(TaggerKind::kIndependent, v);
  EncodedSentence s;
  s.sparse = {{0}, {1}, {}};
  s.dense.resize(3, 0);
  CHECK(predict_independent(m, s) == std::vector<TagId>{0, 0, 0});
  const auto crf = make_tagger_model(TaggerKind::kCrf, v);
  CHECK(log_partition(crf, s) == doctest::Approx(3 * std::log(73.0)));
  // the constrained decode of a flat model stays all-O, which attains the max score
  CHECK(viterbi_decode(crf, s) == std::vector<TagId>{0, 0, 0});
}

TEST_CASE("independent prediction is the per-token argmax") {
  synth::Rng rng(4);
  FeatureVectorizer v({"a", "b", "c"}, 2);
  auto m = make_tagger_model(TaggerKind::kIndependent, v, 6);
  std::normal_distribution<double> g(0, 1);
  for (Eigen::Index i = 0; i < m.local.size(); ++i) m.local.data()[i] = g(rng);
  const auto data = random_examples(rng, 10, 6, 3, 2);
  for (const auto& ex : data) {
    const auto pred = predict_independent(m, ex.features);
    const auto L = local_scores(m, ex.features);
    for (int t = 0; t < ex.features.size(); ++t) {
      Eigen::Index best;
      L.row(t).maxCoeff(&best);
      CHECK(pred[t] == best);
    }
  }
}

TEST_CASE("kind mismatch is an error") {
  FeatureVectorizer v({"a"}, 0);
  const auto m = make_tagger_model(TaggerKind::kIndependent, v);
  EncodedSentence s;
  s.sparse = {{0}};
  s.dense.resize(1, 0);
  CHECK_THROWS_AS(viterbi_decode(m, s), Error);
  CHECK_THROWS_AS(log_partition(m, s), Error);
}

TEST_CASE("one feature per tag is learnable to 99% token accuracy") {
  synth::Rng rng(8);
  std::vector<TaggedSentence> data;
  for (int i = 0; i < 60; ++i) {
    TaggedSentence s;
    const int T = 4;
    s.features.dense.resize(T, 0);
    for (int t = 0; t < T; ++t) {
      const int tag = std::uniform_int_distribution<int>(0, 8)(rng);
      s.tags.push_back(tag);
      s.features.sparse.push_back({"id=" + std::to_string(tag)});
    }
    data.push_back(std::move(s));
  }
  const auto m = train_maxent(data);
  int right = 0, total = 0;
  for (const auto& s : data) {
    const auto pred = predict_independent(m, m.vectorizer.encode(s.features));
    for (std::size_t t = 0; t < pred.size(); ++t, ++total) right += pred[t] == s.tags[t];
  }
  CHECK(right >= 0.99 * total);
}

TEST_CASE("heavy regularization shrinks weights toward zero") {
  std::vector<TaggedSentence> data(1);
  data[0].features.sparse = {{"x"}, {"y"}};
  data[0].features.dense.resize(2, 0);
  data[0].tags = {5, 9};
  double previous = INFINITY;
  for (double lambda : {1.0, 1e2, 1e4, 1e6}) {
    TaggerConfig c;
    c.lambda = lambda;
    const auto m = train_maxent(data, c);
    const double size = m.local.cwiseAbs().maxCoeff();
    CHECK(size < previous);
    previous = size;
  }
  CHECK(previous < 1e-5);
  // in the limit every score ties and the lowest id is chosen
  const auto zero = make_tagger_model(TaggerKind::kIndependent, FeatureVectorizer({"x", "y"}, 0));
  CHECK(predict_independent(zero, zero.vectorizer.encode(data[0].features)) == std::vector<TagId>{0, 0});
}

TEST_CASE("crf training rejects ill-formed gold sequences") {
  std::vector<TaggedSentence> data(1);
  data[0].features.sparse = {{"x"}};
  data[0].features.dense.resize(1, 0);
  data[0].tags = {*tags::parse("B-material")};
  CHECK_THROWS_WITH_AS(train_crf(data), "training sentence 0 has an ill-formed BILOU gold sequence", Error);
  CHECK_NOTHROW(train_maxent(data));
}

TEST_CASE("crf memorizes a one-sentence fixture") {
  Document doc;
  doc.doc_id = "one";
  doc.add_paragraph({synth::parse("The|DT|3|det black|JJ|3|amod solid|NN|5|nsubjpass was|VBD|5|auxpass "
                                  "collected|VBN|0|root .|.|5|punct")});
  doc.gold_mentions = std::vector<EntityMention>{{0, 1, 3, EntityLabel::kIntermed}, {0, 4, 5, EntityLabel::kOperation}};
  const auto data = tagged_sentences(std::span<const Document>(&doc, 1), LexiconSet{}, EmbeddingTable{});
  TrainingReport report;
  const auto m = train_crf(data, {}, &report);
  const auto mentions = tag_mentions(m, doc.sentences[0], LexiconSet{}, EmbeddingTable{});
  CHECK(mentions == *doc.gold_mentions);
  for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
    CHECK(report.objective_trace[i] <= report.objective_trace[i - 1]);
  CHECK(tag_mentions(m, Sentence{}, LexiconSet{}, EmbeddingTable{}).empty());
}

TEST_CASE("separable corpus reaches high segment F1") {
  synth::Rng rng(2);
  const Document doc = synth::separable_tagging_corpus(rng, 120);
  const auto data = tagged_sentences(std::span<const Document>(&doc, 1), LexiconSet{}, EmbeddingTable{});
  TrainingReport report;
  const auto m = train_crf(data, {}, &report);
  std::vector<EntityMention> pred;
  for (const auto& s : doc.sentences) {
    auto p = tag_mentions(m, s, LexiconSet{}, EmbeddingTable{});
    pred.insert(pred.end(), p.begin(), p.end());
  }
  CHECK(entity_prf(pred, *doc.gold_mentions).overall.f1() >= 0.99);
  for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
    CHECK(report.objective_trace[i] <= report.objective_trace[i - 1]);
}
