#include <doctest.h>

#include <sstream>

#include "support/synthetic.hpp"
#include "synthograph/screen.hpp"

using namespace synthograph;

namespace {

ScreenerExample ex(double a, double b, bool positive) { return {Eigen::Vector2d(a, b), positive}; }

Sentence words(const std::string& text, int sent_id = 0) {
  std::istringstream in(text);
  std::string w, spec;
  int i = 0;
  while (in >> w) {
    spec += w + "|X|" + (i == 0 ? "0|root " : "1|dep ");
    ++i;
  }
  return synth::parse(spec, sent_id);
}

}  // namespace

TEST_CASE("temperature units") {
  CHECK(is_temperature_unit("°C"));
  CHECK(is_temperature_unit("℃"));
  CHECK(is_temperature_unit("K"));
  CHECK(is_temperature_unit("oC"));
  CHECK_FALSE(is_temperature_unit("h"));
  CHECK_FALSE(is_temperature_unit("Kg"));
}

TEST_CASE("hand-computed paragraph features") {
  std::istringstream in("solution 1 0\nstirred 0 2\n");
  const EmbeddingTable emb = read_embeddings(in);  // unknown = (0.5, 1)
  LexiconSet lex;
  lex.add("operations", "stirred");
  const std::vector<Sentence> para = {words("The solution was stirred at 180"), words("°C", 1)};
  // 7 tokens: solution, stirred and five unknowns
  const Eigen::VectorXd f = featurize_paragraph(para, emb, lex);
  REQUIRE(f.size() == 6);
  CHECK(f[0] == doctest::Approx((1 + 0 + 5 * 0.5) / 7.0));
  CHECK(f[1] == doctest::Approx((0 + 2 + 5 * 1.0) / 7.0));
  CHECK(f[2] == 1.0);
  CHECK(f[3] == 1.0);
  CHECK(f[4] == 1.0);
  CHECK(f[5] == 0.0);

  // every token unknown: the mean is the unknown vector itself
  const std::vector<Sentence> odd = {words("foo bar baz")};
  const Eigen::VectorXd g = featurize_paragraph(odd, emb, lex);
  CHECK(g.head(2).isApprox(emb.unknown()));
  CHECK(g.tail(4).isZero());
}

TEST_CASE("separable toy set is fit exactly") {
  std::vector<ScreenerExample> data = {ex(1, 1, true), ex(2, 1, true), ex(1.5, 2, true),
                                       ex(-1, -1, false), ex(-2, 0, false), ex(0, -2, false)};
  const auto m = train_screener(data);
  for (const auto& e : data) CHECK((screener_probability(m, e.features) >= 0.5) == e.positive);
}

TEST_CASE("duplicating the data leaves the model unchanged") {
  std::vector<ScreenerExample> data = {ex(1, 0.2, true), ex(0.5, 1, true), ex(-0.3, -1, false), ex(0.2, -0.1, false),
                                       ex(0.1, 0.3, true)};
  std::vector<ScreenerExample> twice = data;
  twice.insert(twice.end(), data.begin(), data.end());
  const auto a = train_screener(data);
  const auto b = train_screener(twice);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(a.bias == doctest::Approx(b.bias).epsilon(1e-8));
}

TEST_CASE("objective trace on a 20-example fixture never increases") {
  synth::Rng rng(13);
  std::normal_distribution<double> g(0, 1);
  std::vector<ScreenerExample> data;
  for (int i = 0; i < 20; ++i) {
    const double a = g(rng), b = g(rng);
    data.push_back(ex(a, b, a + 0.5 * b + 0.3 * g(rng) > 0));
  }
  std::vector<double> trace;
  train_screener(data, {}, &trace);
  REQUIRE(trace.size() > 2);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
  CHECK(trace.back() < trace.front());
}

TEST_CASE("training needs both classes") {
  std::vector<ScreenerExample> data = {ex(1, 1, true), ex(2, 2, true)};
  CHECK_THROWS(train_screener(data));
}

TEST_CASE("paragraph selection") {
  // one binary signal decides: the digit bit
  Document doc;
  doc.add_paragraph({words("has 12 numbers", 0)});
  doc.add_paragraph({words("plain words only", 1)});
  doc.add_paragraph({words("more plain words", 2)});
  doc.add_paragraph({words("mixed 3 times", 3)});
  ScreenerModel m;
  m.weights = Eigen::VectorXd::Zero(kScreenerBinaryFeatures);
  m.weights[1] = 10;
  m.bias = -5;
  CHECK(select_synthesis_paragraphs(doc, m, EmbeddingTable{}, LexiconSet{}) == std::vector<std::size_t>{0, 3});
  m.bias = -50;
  CHECK(select_synthesis_paragraphs(doc, m, EmbeddingTable{}, LexiconSet{}).empty());
}

TEST_CASE("labels of a separable fixture are reproduced") {
  Document doc;
  doc.add_paragraph({words("intro text about things", 0)});
  doc.add_paragraph({words("powder stirred at 80 °C", 1)});
  doc.add_paragraph({words("results were good", 2)});
  doc.add_paragraph({words("gel heated to 500 K", 3)});
  doc.synthesis_labels = std::vector<bool>{false, true, false, true};
  LexiconSet lex;
  lex.add("operations", "stirred");
  lex.add("operations", "heated");
  const auto examples = screener_examples(std::span<const Document>(&doc, 1), EmbeddingTable{}, lex);
  const auto m = train_screener(examples);
  CHECK(select_synthesis_paragraphs(doc, m, EmbeddingTable{}, lex) == std::vector<std::size_t>{1, 3});
}
