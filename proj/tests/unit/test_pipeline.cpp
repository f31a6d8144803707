#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "synthograph/model_io.hpp"
#include "synthograph/pipeline.hpp"

using namespace synthograph;
namespace fs = std::filesystem;

namespace {

const std::string kSample = SYNTHOGRAPH_SAMPLE_DIR;

PipelineConfig sample_config(const fs::path& out) {
  PipelineConfig c;
  c.corpus = kSample + "/corpus.jsonl";
  c.embeddings = kSample + "/embeddings.txt";
  c.lexicons = kSample + "/lexicons";
  c.out_dir = out;
  c.max_iters = 60;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("synthograph_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_file_bytes(p); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SYNTHOGRAPH_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(rc);
#else
  return rc;
#endif
}

}  // namespace

TEST_CASE("inducer names") {
  CHECK(parse_inducer("sequential") == InducerKind::kSequential);
  CHECK(parse_inducer("generative") == InducerKind::kGenerative);
  CHECK_FALSE(parse_inducer("greedy"));
  CHECK(inducer_name(InducerKind::kGenerative) == "generative");
}

TEST_CASE("graph file names are sanitized") {
  CHECK(graph_file_name("tio2-solgel") == "tio2-solgel.graph.json");
  CHECK(graph_file_name("a/b c") == "a_b_c.graph.json");
}

TEST_CASE("sample run writes graphs and metrics, reproducibly") {
  const auto a = fresh_dir("pipe_a");
  const auto b = fresh_dir("pipe_b");
  Diagnostics da(LogLevel::kOff), db(LogLevel::kOff);
  const auto ra = run_pipeline(sample_config(a), da);
  run_pipeline(sample_config(b), db);

  CHECK(ra.graphs.size() == 3);
  REQUIRE(ra.report);
  const auto graphs = read_graph_dir(a);
  CHECK(graphs.size() == 3);
  for (const auto& g : graphs) {
    CHECK(graph_violations(g.graph).empty());
    CHECK(slurp(a / graph_file_name(g.doc_id)) == slurp(b / graph_file_name(g.doc_id)));
  }
  CHECK(fs::exists(a / "metrics.json"));
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(slurp(a / "metrics.json") == slurp(b / "metrics.json"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest.contains("config"));
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.at("stage_timings").size() >= 5);

  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("generative inducer and perfect nodes") {
  const auto out = fresh_dir("pipe_gen");
  auto c = sample_config(out);
  c.inducer = InducerKind::kGenerative;
  c.perfect_nodes = true;
  Diagnostics d(LogLevel::kOff);
  const auto r = run_pipeline(c, d);
  REQUIRE(r.report);
  CHECK(r.report->micro_setting1.precision() == doctest::Approx(r.report->micro_setting1.recall()));
  for (const auto& g : r.graphs) CHECK(graph_violations(g.graph).empty());
  fs::remove_all(out);
}

TEST_CASE("missing inputs fail at startup") {
  const auto out = fresh_dir("pipe_missing");
  auto c = sample_config(out);
  c.embeddings = "/nonexistent/embeddings.txt";
  Diagnostics d(LogLevel::kOff);
  try {
    run_pipeline(c, d);
    FAIL("expected a startup error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "startup");
    CHECK(e.cause().find("/nonexistent/embeddings.txt") != std::string::npos);
    const auto j = e.to_json();
    CHECK(j.at("error").at("stage") == "startup");
  }
  CHECK(fs::is_empty(out));
  fs::remove_all(out);
}

TEST_CASE("tagger model with a different embedding dimension is rejected") {
  const auto out = fresh_dir("pipe_dim");
  auto c = sample_config(out);
  c.out_dir.reset();
  Resources res = load_resources(c);
  const auto model = obtain_tagger(c, res);
  save_model(out / "tagger.bin", model);
  c.tagger_model = out / "tagger.bin";
  CHECK(obtain_tagger(c, res) == model);
  res.embeddings = EmbeddingTable(res.embeddings.dimension() + 1, {});
  CHECK_THROWS_WITH(obtain_tagger(c, res), doctest::Contains("embedding dimension"));
  fs::remove_all(out);
}

TEST_CASE("command line exit codes") {
  const auto out = fresh_dir("pipe_cli");
  const std::string common = " --corpus " + kSample + "/corpus.jsonl --embeddings " + kSample +
                             "/embeddings.txt --lexicons " + kSample + "/lexicons";
  CHECK(run_cli("pipeline" + common + " --max-iters 40 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "metrics.json"));
  CHECK(run_cli("pipeline --corpus /nonexistent.jsonl --out " + out.string()) == 1);
  CHECK(run_cli("pipeline" + common + " --inducer greedy") != 0);
  CHECK(run_cli("train-tagger" + common + " --max-iters 20 --model " + (out / "t.bin").string()) == 0);
  CHECK(peek_model_type(read_file_bytes(out / "t.bin")) == ModelType::kTagger);
  CHECK(run_cli("tag" + common + " --model " + (out / "missing.bin").string()) == 1);
  fs::remove_all(out);
}
