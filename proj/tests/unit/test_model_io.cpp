#include <doctest.h>

#include <filesystem>

#include "support/synthetic.hpp"
#include "synthograph/corpus.hpp"
#include "synthograph/error.hpp"
#include "synthograph/features.hpp"
#include "synthograph/model_io.hpp"
#include "synthograph/screen.hpp"
#include "synthograph/tagger.hpp"

using namespace synthograph;

namespace {

const std::string kSample = SYNTHOGRAPH_SAMPLE_DIR;

struct Sample {
  std::vector<Document> docs = load_corpus(kSample + "/corpus.jsonl");
  EmbeddingTable emb = load_embeddings(kSample + "/embeddings.txt");
  LexiconSet lex = load_lexicons(kSample + "/lexicons");
};

const Sample& sample() {
  static const Sample s;
  return s;
}

TaggerModel trained_crf() {
  const auto data = tagged_sentences(sample().docs, sample().lex, sample().emb);
  TaggerConfig c;
  c.max_iterations = 40;
  return train_crf(data, c);
}

void put_u32(std::string& bytes, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

}  // namespace

TEST_CASE("tagger round trip keeps predictions") {
  const auto m = trained_crf();
  const auto bytes = serialize_model(m);
  const auto back = deserialize_tagger(bytes);
  CHECK(back == m);
  for (const auto& d : sample().docs)
    for (const auto& s : d.sentences)
      CHECK(tag_mentions(back, s, sample().lex, sample().emb) == tag_mentions(m, s, sample().lex, sample().emb));

  const auto path = std::filesystem::temp_directory_path() / "synthograph_test_tagger.bin";
  save_model(path, m);
  CHECK(load_tagger_model(path) == m);
  std::filesystem::remove(path);
}

TEST_CASE("screener and origin round trips") {
  ScreenerModel s;
  s.weights = Eigen::VectorXd::LinSpaced(kScreenerBinaryFeatures + 4, -1, 1);
  s.bias = 0.25;
  CHECK(deserialize_screener(serialize_model(s)) == s);
  CHECK(peek_model_type(serialize_model(s)) == ModelType::kScreener);

  OriginModel o = OriginModel::uniform(0.3);
  o.vocabulary = {"<unk>", "gel", "powder"};
  o.emissions["dry"] = Eigen::Vector3d(0.2, 0.3, 0.5);
  CHECK(deserialize_origin(serialize_model(o)) == o);
}

TEST_CASE("corrupt files are rejected with a clear message") {
  ScreenerModel s;
  s.weights = Eigen::VectorXd::Ones(kScreenerBinaryFeatures + 2);
  const auto bytes = serialize_model(s);

  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{20}, bytes.size() - 1})
    CHECK_THROWS_AS(deserialize_screener(bytes.substr(0, cut)), ModelFormatError);

  CHECK_THROWS_WITH_AS(deserialize_tagger(bytes), doctest::Contains("model type mismatch"), ModelFormatError);

  auto flipped = bytes;
  flipped[30] = static_cast<char>(flipped[30] ^ 0x40);
  CHECK_THROWS_WITH_AS(deserialize_screener(flipped), doctest::Contains("checksum"), ModelFormatError);

  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_WITH_AS(deserialize_screener(magic), doctest::Contains("magic"), ModelFormatError);

  auto container = bytes;
  put_u32(container, 4, kContainerVersion + 1);
  CHECK_THROWS_WITH_AS(deserialize_screener(container), doctest::Contains("container version"), ModelFormatError);

  auto schema = bytes;
  put_u32(schema, 12, 99);
  CHECK_THROWS_WITH_AS(deserialize_screener(schema), doctest::Contains("schema version"), ModelFormatError);
}
