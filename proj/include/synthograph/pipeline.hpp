#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "synthograph/corpus.hpp"
#include "synthograph/diagnostics.hpp"
#include "synthograph/error.hpp"
#include "synthograph/eval.hpp"
#include "synthograph/origin.hpp"
#include "synthograph/screen.hpp"
#include "synthograph/tagger.hpp"

namespace synthograph {

enum class InducerKind { kSequential, kGenerative };

std::string_view inducer_name(InducerKind k);
std::optional<InducerKind> parse_inducer(std::string_view s);

struct PipelineConfig {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> lexicons;
  std::optional<std::filesystem::path> tagger_model;
  std::optional<std::filesystem::path> screener_model;
  std::optional<std::filesystem::path> origin_model;
  std::optional<std::filesystem::path> out_dir;
  TaggerKind tagger = TaggerKind::kCrf;
  InducerKind inducer = InducerKind::kSequential;
  double lambda = 0.1;
  double alpha = 0.1;
  double gamma = 0.5;
  int max_iters = 200;
  int em_iters = 50;
  std::uint64_t seed = 42;
  /// Take nodes and association edges from the gold graphs.
  bool perfect_nodes = false;

  nlohmann::json to_json() const;
};

/// Failure inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string doc_id, const std::string& cause)
      : Error(stage + (doc_id.empty() ? "" : " [" + doc_id + "]") + ": " + cause),
        stage_(std::move(stage)),
        doc_id_(std::move(doc_id)),
        cause_(cause) {}

  const std::string& stage() const { return stage_; }
  const std::string& doc_id() const { return doc_id_; }
  const std::string& cause() const { return cause_; }
  nlohmann::json to_json() const;

 private:
  std::string stage_;
  std::string doc_id_;
  std::string cause_;
};

struct RunManifest {
  nlohmann::json config;
  std::string tool_version;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::map<std::string, int> diagnostics;

  nlohmann::json to_json() const;
};

/// Corpus plus the optional embedding table and lexicons.
struct Resources {
  std::vector<Document> corpus;
  EmbeddingTable embeddings;
  LexiconSet lexicons;
};

/// Checks every configured path before loading anything.
Resources load_resources(const PipelineConfig& config);

struct DocumentGraph {
  std::string doc_id;
  ActionGraph graph;
};

struct PipelineResult {
  std::vector<DocumentGraph> graphs;
  std::vector<std::vector<EntityMention>> mentions;
  std::optional<EvaluationReport> report;
  RunManifest manifest;
};

/// Screener from the configured model file, or trained on labeled paragraphs;
/// nullopt when neither is available.
std::optional<ScreenerModel> obtain_screener(const PipelineConfig& config, const Resources& res);
/// Tagger from the configured model file, or trained on gold mentions.
TaggerModel obtain_tagger(const PipelineConfig& config, const Resources& res);

/// Paragraph indices forming the synthesis procedure (all when no screener).
std::vector<std::size_t> procedure_paragraphs(const Document& doc, const ScreenerModel* screener,
                                              const Resources& res);
std::vector<const Sentence*> procedure_sentences(const Document& doc, std::span<const std::size_t> paragraphs);

std::vector<EntityMention> tag_document(const TaggerModel& model, std::span<const Sentence* const> sentences,
                                        const Resources& res);

/// events -> graph with head lemmas, no reference edges.
ActionGraph extract_graph(const Document& doc, std::span<const Sentence* const> sentences,
                          std::span<const EntityMention> mentions, Diagnostics* diag);

/// Induces reference edges for every graph with the configured inducer.
std::vector<ActionGraph> induce_all(std::span<const ActionGraph> graphs, const PipelineConfig& config,
                                    Diagnostics* diag, OriginModel* trained = nullptr);

/// screen -> tag -> events -> graph -> edges -> evaluation. Writes
/// <doc_id>.graph.json, metrics.json and manifest.json when out_dir is set.
PipelineResult run_pipeline(const PipelineConfig& config, Diagnostics& diag);

/// File name used for a document's graph output.
std::string graph_file_name(const std::string& doc_id);
void write_graph_file(const std::filesystem::path& path, const std::string& doc_id, const ActionGraph& g);
DocumentGraph read_graph_file(const std::filesystem::path& path);
/// Every *.graph.json under `dir`, sorted by file name.
std::vector<DocumentGraph> read_graph_dir(const std::filesystem::path& dir);

/// Mention lists as written by `tag`: one JSON line per document.
nlohmann::json mentions_to_json(const std::string& doc_id, std::span<const EntityMention> mentions);
std::map<std::string, std::vector<EntityMention>> read_mentions_file(const std::filesystem::path& path);

/// Evaluates predicted graphs against the gold graphs of `corpus` (matched by doc_id).
EvaluationReport evaluate_against(std::span<const Document> corpus, std::span<const DocumentGraph> predicted,
                                  const std::vector<std::vector<EntityMention>>* mentions = nullptr);

}  // namespace synthograph
