#include "synthograph/pipeline.hpp"

#include <chrono>
#include <fstream>

#include "synthograph/events.hpp"
#include "synthograph/graph.hpp"
#include "synthograph/model_io.hpp"

namespace synthograph {

using nlohmann::json;

std::string_view inducer_name(InducerKind k) { return k == InducerKind::kSequential ? "sequential" : "generative"; }

std::optional<InducerKind> parse_inducer(std::string_view s) {
  if (s == "sequential") return InducerKind::kSequential;
  if (s == "generative") return InducerKind::kGenerative;
  return std::nullopt;
}

json PipelineConfig::to_json() const {
  auto opt = [](const std::optional<std::filesystem::path>& p) { return p ? json(p->string()) : json(nullptr); };
  return {{"corpus", corpus.string()},
          {"embeddings", opt(embeddings)},
          {"lexicons", opt(lexicons)},
          {"tagger_model", opt(tagger_model)},
          {"screener_model", opt(screener_model)},
          {"origin_model", opt(origin_model)},
          {"out_dir", opt(out_dir)},
          {"tagger", tagger_kind_name(tagger)},
          {"inducer", inducer_name(inducer)},
          {"lambda", lambda},
          {"alpha", alpha},
          {"gamma", gamma},
          {"max_iters", max_iters},
          {"em_iters", em_iters},
          {"seed", seed},
          {"perfect_nodes", perfect_nodes}};
}

json StageError::to_json() const {
  return {{"error", {{"stage", stage_}, {"doc_id", doc_id_}, {"message", cause_}}}};
}

json RunManifest::to_json() const {
  json timings = json::array();
  for (const auto& [stage, s] : stage_seconds) timings.push_back({{"stage", stage}, {"seconds", s}});
  return {{"config", config}, {"tool_version", tool_version}, {"stage_timings", timings}, {"diagnostics", diagnostics}};
}

Resources load_resources(const PipelineConfig& config) {
  auto require = [](const std::filesystem::path& p, const char* what) {
    std::error_code ec;
    if (!std::filesystem::exists(p, ec)) throw StageError("startup", "", std::string(what) + " not found: " + p.string());
  };
  require(config.corpus, "corpus");
  if (config.embeddings) require(*config.embeddings, "embeddings file");
  if (config.lexicons) require(*config.lexicons, "lexicon directory");
  if (config.tagger_model) require(*config.tagger_model, "tagger model");
  if (config.screener_model) require(*config.screener_model, "screener model");
  if (config.origin_model) require(*config.origin_model, "origin model");

  Resources res;
  try {
    res.corpus = load_corpus(config.corpus);
    if (config.embeddings) res.embeddings = load_embeddings(*config.embeddings);
    if (config.lexicons) res.lexicons = load_lexicons(*config.lexicons);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("load", "", e.what());
  }
  return res;
}

std::optional<ScreenerModel> obtain_screener(const PipelineConfig& config, const Resources& res) {
  if (config.screener_model) return load_screener_model(*config.screener_model);
  auto examples = screener_examples(res.corpus, res.embeddings, res.lexicons);
  bool pos = false, neg = false;
  for (const auto& e : examples) (e.positive ? pos : neg) = true;
  if (!pos || !neg) return std::nullopt;
  ScreenerConfig sc;
  sc.lambda = config.lambda;
  return train_screener(examples, sc);
}

TaggerModel obtain_tagger(const PipelineConfig& config, const Resources& res) {
  if (config.tagger_model) {
    TaggerModel m = load_tagger_model(*config.tagger_model);
    if (m.vectorizer.embedding_dimension() != res.embeddings.dimension())
      throw Error("tagger model expects embedding dimension " + std::to_string(m.vectorizer.embedding_dimension()) +
                  ", embeddings have " + std::to_string(res.embeddings.dimension()));
    return m;
  }
  auto data = tagged_sentences(res.corpus, res.lexicons, res.embeddings);
  if (data.empty()) throw Error("no tagger model given and the corpus has no gold mentions to train on");
  TaggerConfig tc;
  tc.lambda = config.lambda;
  tc.max_iterations = config.max_iters;
  return train_tagger(config.tagger, data, tc);
}

std::vector<std::size_t> procedure_paragraphs(const Document& doc, const ScreenerModel* screener,
                                              const Resources& res) {
  if (screener) return select_synthesis_paragraphs(doc, *screener, res.embeddings, res.lexicons);
  std::vector<std::size_t> all(doc.paragraph_count());
  for (std::size_t p = 0; p < all.size(); ++p) all[p] = p;
  return all;
}

std::vector<const Sentence*> procedure_sentences(const Document& doc, std::span<const std::size_t> paragraphs) {
  std::vector<const Sentence*> out;
  for (std::size_t p : paragraphs) {
    for (const auto& s : doc.paragraph(p)) out.push_back(&s);
  }
  return out;
}

std::vector<EntityMention> tag_document(const TaggerModel& model, std::span<const Sentence* const> sentences,
                                        const Resources& res) {
  std::vector<EntityMention> out;
  for (const Sentence* s : sentences) {
    auto m = tag_mentions(model, *s, res.lexicons, res.embeddings);
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

ActionGraph extract_graph(const Document& doc, std::span<const Sentence* const> sentences,
                          std::span<const EntityMention> mentions, Diagnostics* diag) {
  std::vector<Sentence> copy;
  copy.reserve(sentences.size());
  for (const Sentence* s : sentences) copy.push_back(*s);
  const auto events = extract_events(copy, mentions, diag, doc.doc_id);
  ActionGraph g = assemble_graph(events, diag, doc.doc_id);
  attach_head_lemmas(g, doc);
  return g;
}

std::vector<ActionGraph> induce_all(std::span<const ActionGraph> graphs, const PipelineConfig& config,
                                    Diagnostics* diag, OriginModel* trained) {
  std::vector<ActionGraph> out;
  out.reserve(graphs.size());
  if (config.inducer == InducerKind::kSequential) {
    for (const auto& g : graphs) out.push_back(induce_edges_sequential(g));
    return out;
  }
  OriginModel model;
  if (config.origin_model) {
    model = load_origin_model(*config.origin_model);
  } else if (sequential_assignments(graphs).empty()) {
    // nothing to learn from; every reference-needing node is raw anyway
    if (diag) diag->info("induce", "no_candidates", "", "no node has an earlier operation; origin model left uniform");
    model = OriginModel::uniform(config.gamma);
  } else {
    OriginConfig oc;
    oc.alpha = config.alpha;
    oc.gamma_init = config.gamma;
    oc.max_iterations = config.em_iters;
    auto training = train_origin_model(graphs, oc);
    if (diag) {
      diag->info("induce", "hard_em", "",
                 "iterations=" + std::to_string(training.iterations) +
                     " converged=" + (training.converged ? "true" : "false"));
    }
    model = std::move(training.model);
  }
  for (const auto& g : graphs) out.push_back(apply_origin_model(model, g));
  if (trained) *trained = std::move(model);
  return out;
}

std::string graph_file_name(const std::string& doc_id) {
  std::string safe;
  for (char c : doc_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    safe += ok ? c : '_';
  }
  if (safe.empty()) safe = "_";
  return safe + ".graph.json";
}

void write_graph_file(const std::filesystem::path& path, const std::string& doc_id, const ActionGraph& g) {
  json j = graph_to_json(g);
  j["doc_id"] = doc_id;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write graph file '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

DocumentGraph read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string(), e.what());
  }
  DocumentGraph dg;
  dg.doc_id = j.value("doc_id", path.stem().stem().string());
  dg.graph = graph_from_json(j);
  return dg;
}

std::vector<DocumentGraph> read_graph_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.ends_with(".graph.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DocumentGraph> out;
  for (const auto& f : files) out.push_back(read_graph_file(f));
  return out;
}

json mentions_to_json(const std::string& doc_id, std::span<const EntityMention> mentions) {
  json jm = json::array();
  for (const auto& m : mentions)
    jm.push_back({{"sent_id", m.sent_id}, {"start", m.start}, {"end", m.end}, {"label", label_name(m.label)}});
  return {{"doc_id", doc_id}, {"mentions", std::move(jm)}};
}

std::map<std::string, std::vector<EntityMention>> read_mentions_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mentions file '" + path.string() + "'");
  std::map<std::string, std::vector<EntityMention>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      auto& list = out[j.at("doc_id").get<std::string>()];
      for (const auto& m : j.at("mentions")) {
        auto label = parse_label(m.at("label").get<std::string>());
        if (!label) throw ParseError(lineno, "label", "unknown entity label");
        list.push_back({m.at("sent_id").get<int>(), m.at("start").get<int>(), m.at("end").get<int>(), *label});
      }
    } catch (const json::exception& e) {
      throw ParseError(lineno, "mentions", e.what());
    }
  }
  return out;
}

EvaluationReport evaluate_against(std::span<const Document> corpus, std::span<const DocumentGraph> predicted,
                                  const std::vector<std::vector<EntityMention>>* mentions) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : corpus) by_id[d.doc_id] = &d;
  std::vector<GraphEvaluation> evals;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    auto it = by_id.find(predicted[i].doc_id);
    if (it == by_id.end() || !it->second->gold_graph) continue;
    const Document& doc = *it->second;
    auto ev = evaluate_graph(doc.doc_id, predicted[i].graph, *doc.gold_graph, global_token_index(doc));
    if (mentions && i < mentions->size() && doc.gold_mentions) ev.entities = entity_prf((*mentions)[i], *doc.gold_mentions);
    evals.push_back(std::move(ev));
  }
  return summarize(std::move(evals));
}

PipelineResult run_pipeline(const PipelineConfig& config, Diagnostics& diag) {
  using clock = std::chrono::steady_clock;
  PipelineResult result;
  result.manifest.config = config.to_json();
  result.manifest.tool_version = SYNTHOGRAPH_VERSION;
  auto t0 = clock::now();
  auto lap = [&](const char* stage) {
    auto t1 = clock::now();
    result.manifest.stage_seconds.emplace_back(stage, std::chrono::duration<double>(t1 - t0).count());
    t0 = t1;
  };

  Resources res = load_resources(config);
  if (config.out_dir) std::filesystem::create_directories(*config.out_dir);
  lap("load");

  std::optional<ScreenerModel> screener;
  try {
    screener = obtain_screener(config, res);
  } catch (const std::exception& e) {
    throw StageError("screen", "", e.what());
  }
  if (!screener) diag.info("screen", "no_screener", "", "no screener model or labels; every paragraph is used");
  std::vector<std::vector<std::size_t>> paragraphs;
  for (const auto& doc : res.corpus) {
    try {
      paragraphs.push_back(procedure_paragraphs(doc, screener ? &*screener : nullptr, res));
    } catch (const std::exception& e) {
      throw StageError("screen", doc.doc_id, e.what());
    }
    if (paragraphs.back().empty()) diag.warn("screen", "no_synthesis_paragraph", doc.doc_id, "no paragraph selected");
  }
  lap("screen");

  std::vector<ActionGraph> node_graphs;
  if (config.perfect_nodes) {
    for (const auto& doc : res.corpus) {
      if (!doc.gold_graph) throw StageError("extract", doc.doc_id, "perfect node segmentation needs a gold graph");
      ActionGraph g = strip_reference_edges(*doc.gold_graph);
      attach_head_lemmas(g, doc);
      node_graphs.push_back(std::move(g));
      result.mentions.emplace_back();
    }
    lap("extract");
  } else {
    TaggerModel tagger;
    try {
      tagger = obtain_tagger(config, res);
    } catch (const std::exception& e) {
      throw StageError("tag", "", e.what());
    }
    for (std::size_t d = 0; d < res.corpus.size(); ++d) {
      const Document& doc = res.corpus[d];
      const auto sentences = procedure_sentences(doc, paragraphs[d]);
      try {
        result.mentions.push_back(tag_document(tagger, sentences, res));
      } catch (const std::exception& e) {
        throw StageError("tag", doc.doc_id, e.what());
      }
    }
    lap("tag");
    for (std::size_t d = 0; d < res.corpus.size(); ++d) {
      const Document& doc = res.corpus[d];
      try {
        node_graphs.push_back(extract_graph(doc, procedure_sentences(doc, paragraphs[d]), result.mentions[d], &diag));
      } catch (const std::exception& e) {
        throw StageError("extract", doc.doc_id, e.what());
      }
    }
    lap("extract");
  }

  std::vector<ActionGraph> induced;
  try {
    induced = induce_all(node_graphs, config, &diag);
  } catch (const std::exception& e) {
    throw StageError("induce", "", e.what());
  }
  for (std::size_t d = 0; d < induced.size(); ++d) {
    auto v = graph_violations(induced[d]);
    if (!v.empty()) throw StageError("induce", res.corpus[d].doc_id, "invalid graph: " + v.front());
    result.graphs.push_back({res.corpus[d].doc_id, std::move(induced[d])});
  }
  lap("induce");

  const bool any_gold = std::any_of(res.corpus.begin(), res.corpus.end(), [](const Document& d) { return d.gold_graph.has_value(); });
  if (any_gold) {
    result.report = evaluate_against(res.corpus, result.graphs, config.perfect_nodes ? nullptr : &result.mentions);
  }
  lap("evaluate");

  if (config.out_dir) {
    for (const auto& dg : result.graphs) write_graph_file(*config.out_dir / graph_file_name(dg.doc_id), dg.doc_id, dg.graph);
    if (result.report) {
      std::ofstream out(*config.out_dir / "metrics.json", std::ios::binary);
      out << report_to_json(*result.report).dump(2) << '\n';
    }
  }
  result.manifest.diagnostics = diag.counts();
  if (config.out_dir) {
    std::ofstream out(*config.out_dir / "manifest.json", std::ios::binary);
    out << result.manifest.to_json().dump(2) << '\n';
  }
  return result;
}

}  // namespace synthograph
