#include "synthograph/screen.hpp"

#include <cctype>
#include <cmath>

#include "synthograph/error.hpp"
#include "synthograph/optimize.hpp"

namespace synthograph {

namespace {

bool has_digit(std::string_view s) {
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

bool is_temperature_unit(std::string_view token) {
  if (token.starts_with("\xC2\xB0") || token.starts_with("\xE2\x84\x83")) return true;  // ° ℃
  const std::string t = to_lower(token);
  return t == "k" || t == "oc" || t == "degc" || t == "kelvin" || t == "celsius";
}

Eigen::VectorXd featurize_paragraph(std::span<const Sentence> paragraph, const EmbeddingTable& emb,
                                    const LexiconSet& lex) {
  const int dim = emb.dimension();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim + kScreenerBinaryFeatures);
  std::size_t count = 0;
  bool op = false, digit = false, temp = false;
  for (const auto& s : paragraph) {
    for (const auto& t : s.tokens) {
      out.head(dim) += emb.lookup(t.surface);
      ++count;
      op = op || lex.member("operations", t.surface) || lex.member("operations", t.lemma);
      digit = digit || has_digit(t.surface);
      temp = temp || is_temperature_unit(t.surface);
    }
  }
  if (count == 0) throw Error("cannot featurize an empty paragraph");
  out.head(dim) /= static_cast<double>(count);
  out[dim + 0] = op;
  out[dim + 1] = digit;
  out[dim + 2] = temp;
  out[dim + 3] = count > kLongParagraphTokens;
  return out;
}

ScreenerModel train_screener(std::span<const ScreenerExample> examples, const ScreenerConfig& config,
                             std::vector<double>* trace) {
  if (examples.empty()) throw Error("screener training needs at least one example");
  bool pos = false, neg = false;
  const Eigen::Index width = examples.front().features.size();
  for (const auto& e : examples) {
    if (e.features.size() != width) throw Error("screener examples have inconsistent feature widths");
    (e.positive ? pos : neg) = true;
  }
  if (!pos || !neg) throw Error("screener training needs both positive and negative examples");

  Eigen::MatrixXd X(examples.size(), width);
  Eigen::VectorXd y(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    X.row(i) = examples[i].features.transpose();
    y[i] = examples[i].positive ? 1.0 : -1.0;
  }
  const double n = static_cast<double>(examples.size());
  const double lambda = config.lambda;

  // params = [w ; b]
  Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd& grad) {
    const auto w = p.head(width);
    const double b = p[width];
    const Eigen::VectorXd margin = (y.array() * ((X * w).array() + b)).matrix();
    double loss = 0;
    Eigen::VectorXd coef(margin.size());
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      loss += softplus(-margin[i]);
      coef[i] = -y[i] * sigmoid(-margin[i]) / n;
    }
    grad.head(width) = X.transpose() * coef + lambda * w;
    grad[width] = coef.sum();
    return loss / n + 0.5 * lambda * w.squaredNorm();
  };

  OptimizerConfig oc;
  oc.max_iterations = config.max_iterations;
  oc.relative_tolerance = config.relative_tolerance;
  auto result = minimize(objective, Eigen::VectorXd::Zero(width + 1), oc);
  if (trace) *trace = result.trace;

  ScreenerModel model;
  model.weights = result.x.head(width);
  model.bias = result.x[width];
  return model;
}

double screener_probability(const ScreenerModel& model, const Eigen::VectorXd& features) {
  if (features.size() != model.weights.size())
    throw Error("screener feature width " + std::to_string(features.size()) + " does not match model width " +
                std::to_string(model.weights.size()));
  return sigmoid(model.weights.dot(features) + model.bias);
}

std::vector<std::size_t> select_synthesis_paragraphs(const Document& doc, const ScreenerModel& model,
                                                     const EmbeddingTable& emb, const LexiconSet& lex) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < doc.paragraph_count(); ++p) {
    auto para = doc.paragraph(p);
    if (para.empty()) continue;
    if (screener_probability(model, featurize_paragraph(para, emb, lex)) >= 0.5) out.push_back(p);
  }
  return out;
}

std::vector<ScreenerExample> screener_examples(std::span<const Document> docs, const EmbeddingTable& emb,
                                               const LexiconSet& lex) {
  std::vector<ScreenerExample> out;
  for (const auto& d : docs) {
    if (!d.synthesis_labels) continue;
    for (std::size_t p = 0; p < d.paragraph_count(); ++p) {
      if (d.paragraph(p).empty()) continue;
      out.push_back({featurize_paragraph(d.paragraph(p), emb, lex), (*d.synthesis_labels)[p]});
    }
  }
  return out;
}

}  // namespace synthograph
