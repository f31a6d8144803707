// synthograph command line: every pipeline stage as a subcommand.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthograph/events.hpp"
#include "synthograph/graph.hpp"
#include "synthograph/model_io.hpp"
#include "synthograph/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace synthograph;

namespace {

struct Options {
  std::string corpus, embeddings, lexicons, model, out, graphs, mentions;
  std::string screener_model, origin_model;
  std::string tagger = "crf";
  std::string inducer = "sequential";
  std::uint64_t seed = 42;
  double lambda = 0.1, alpha = 0.1, gamma = 0.5;
  int max_iters = 200, em_iters = 50;
  bool perfect_nodes = false;
};

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

PipelineConfig make_config(const Options& o) {
  PipelineConfig c;
  c.corpus = o.corpus;
  c.embeddings = opt_path(o.embeddings);
  c.lexicons = opt_path(o.lexicons);
  c.screener_model = opt_path(o.screener_model);
  c.origin_model = opt_path(o.origin_model);
  c.out_dir = opt_path(o.out);
  auto tk = parse_tagger_kind(o.tagger);
  if (!tk) throw StageError("startup", "", "unknown tagger kind '" + o.tagger + "'");
  c.tagger = *tk;
  auto ik = parse_inducer(o.inducer);
  if (!ik) throw StageError("startup", "", "unknown inducer '" + o.inducer + "'");
  c.inducer = *ik;
  c.lambda = o.lambda;
  c.alpha = o.alpha;
  c.gamma = o.gamma;
  c.max_iters = o.max_iters;
  c.em_iters = o.em_iters;
  c.seed = o.seed;
  c.perfect_nodes = o.perfect_nodes;
  return c;
}

void require_path(const std::string& p, const char* what) {
  if (p.empty()) throw StageError("startup", "", std::string(what) + " is required");
  if (!fs::exists(p)) throw StageError("startup", "", std::string(what) + " not found: " + p);
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

void write_graphs(const fs::path& dir, const std::vector<DocumentGraph>& graphs) {
  fs::create_directories(dir);
  for (const auto& dg : graphs) write_graph_file(dir / graph_file_name(dg.doc_id), dg.doc_id, dg.graph);
}

// --- subcommands -------------------------------------------------------------

int cmd_screen(const Options& o) {
  PipelineConfig c = make_config(o);
  if (!o.model.empty()) c.screener_model = o.model;
  Resources res = load_resources(c);
  auto screener = obtain_screener(c, res);
  if (!screener) throw StageError("screen", "", "no screener model given and the corpus lacks labels of both classes");
  if (!o.model.empty() && !fs::exists(o.model)) save_model(o.model, *screener);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    if (o.model.empty()) save_model(fs::path(o.out) / "screener.model", *screener);
    file = open_out(fs::path(o.out) / "screen.jsonl");
    out = &file;
  }
  for (const auto& doc : res.corpus) {
    json probs = json::array();
    for (std::size_t p = 0; p < doc.paragraph_count(); ++p) {
      const auto para = doc.paragraph(p);
      probs.push_back(screener_probability(*screener, featurize_paragraph(para, res.embeddings, res.lexicons)));
    }
    const auto sel = select_synthesis_paragraphs(doc, *screener, res.embeddings, res.lexicons);
    *out << json{{"doc_id", doc.doc_id}, {"probabilities", probs}, {"selected", sel}}.dump() << '\n';
  }
  return 0;
}

int cmd_train_tagger(const Options& o) {
  if (o.model.empty()) throw StageError("startup", "", "--model output path is required");
  PipelineConfig c = make_config(o);
  Resources res = load_resources(c);
  auto data = tagged_sentences(res.corpus, res.lexicons, res.embeddings);
  if (data.empty()) throw StageError("tag", "", "corpus has no gold mentions to train on");
  TaggerConfig tc;
  tc.lambda = o.lambda;
  tc.max_iterations = o.max_iters;
  TrainingReport report;
  TaggerModel model;
  try {
    model = train_tagger(c.tagger, data, tc, &report);
  } catch (const std::exception& e) {
    throw StageError("tag", "", e.what());
  }
  save_model(o.model, model);
  std::cout << json{{"tagger", tagger_kind_name(model.kind)},
                    {"sentences", data.size()},
                    {"iterations", report.iterations},
                    {"stop_reason", report.stop_reason},
                    {"objective", report.objective_trace.empty() ? 0.0 : report.objective_trace.back()}}
                   .dump()
            << '\n';
  return 0;
}

// Tags the procedure sentences of every document.
std::vector<std::vector<EntityMention>> run_tagging(const Options& o, const PipelineConfig& c, const Resources& res,
                                                    std::vector<std::vector<std::size_t>>& paragraphs) {
  PipelineConfig tc = c;
  tc.tagger_model = o.model;
  TaggerModel tagger = obtain_tagger(tc, res);
  auto screener = obtain_screener(c, res);
  std::vector<std::vector<EntityMention>> out;
  for (const auto& doc : res.corpus) {
    paragraphs.push_back(procedure_paragraphs(doc, screener ? &*screener : nullptr, res));
    try {
      out.push_back(tag_document(tagger, procedure_sentences(doc, paragraphs.back()), res));
    } catch (const std::exception& e) {
      throw StageError("tag", doc.doc_id, e.what());
    }
  }
  return out;
}

int cmd_tag(const Options& o) {
  require_path(o.model, "--model (tagger)");
  PipelineConfig c = make_config(o);
  Resources res = load_resources(c);
  std::vector<std::vector<std::size_t>> paragraphs;
  auto mentions = run_tagging(o, c, res, paragraphs);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    file = open_out(fs::path(o.out) / "mentions.jsonl");
    out = &file;
  }
  for (std::size_t d = 0; d < res.corpus.size(); ++d)
    *out << mentions_to_json(res.corpus[d].doc_id, mentions[d]).dump() << '\n';
  return 0;
}

int cmd_extract(const Options& o) {
  if (o.out.empty()) throw StageError("startup", "", "--out is required");
  PipelineConfig c = make_config(o);
  Resources res = load_resources(c);
  Diagnostics diag;
  std::vector<DocumentGraph> graphs;
  if (o.perfect_nodes) {
    for (const auto& doc : res.corpus) {
      if (!doc.gold_graph) throw StageError("extract", doc.doc_id, "perfect node segmentation needs a gold graph");
      ActionGraph g = strip_reference_edges(*doc.gold_graph);
      attach_head_lemmas(g, doc);
      graphs.push_back({doc.doc_id, std::move(g)});
    }
  } else {
    std::vector<std::vector<std::size_t>> paragraphs;
    std::vector<std::vector<EntityMention>> mentions;
    if (!o.mentions.empty()) {
      require_path(o.mentions, "--mentions");
      auto by_doc = read_mentions_file(o.mentions);
      auto screener = obtain_screener(c, res);
      for (const auto& doc : res.corpus) {
        paragraphs.push_back(procedure_paragraphs(doc, screener ? &*screener : nullptr, res));
        mentions.push_back(by_doc[doc.doc_id]);
      }
    } else {
      require_path(o.model, "--model (tagger) or --mentions");
      mentions = run_tagging(o, c, res, paragraphs);
    }
    for (std::size_t d = 0; d < res.corpus.size(); ++d) {
      const auto& doc = res.corpus[d];
      try {
        graphs.push_back({doc.doc_id, extract_graph(doc, procedure_sentences(doc, paragraphs[d]), mentions[d], &diag)});
      } catch (const std::exception& e) {
        throw StageError("extract", doc.doc_id, e.what());
      }
    }
  }
  write_graphs(o.out, graphs);
  return 0;
}

int cmd_induce(const Options& o) {
  require_path(o.graphs, "--graphs");
  if (o.out.empty()) throw StageError("startup", "", "--out is required");
  PipelineConfig c;
  auto ik = parse_inducer(o.inducer);
  if (!ik) throw StageError("startup", "", "unknown inducer '" + o.inducer + "'");
  c.inducer = *ik;
  c.alpha = o.alpha;
  c.gamma = o.gamma;
  c.em_iters = o.em_iters;
  if (!o.model.empty()) {
    require_path(o.model, "--model (origin)");
    c.origin_model = o.model;
  }
  auto docs = read_graph_dir(o.graphs);
  std::vector<ActionGraph> graphs;
  for (const auto& dg : docs) graphs.push_back(strip_reference_edges(dg.graph));
  Diagnostics diag;
  auto induced = induce_all(graphs, c, &diag);
  std::vector<DocumentGraph> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto v = graph_violations(induced[i]);
    if (!v.empty()) throw StageError("induce", docs[i].doc_id, "invalid graph: " + v.front());
    out.push_back({docs[i].doc_id, std::move(induced[i])});
  }
  write_graphs(o.out, out);
  return 0;
}

int cmd_train_origin(const Options& o) {
  require_path(o.graphs, "--graphs");
  if (o.model.empty()) throw StageError("startup", "", "--model output path is required");
  auto docs = read_graph_dir(o.graphs);
  std::vector<ActionGraph> graphs;
  for (const auto& dg : docs) graphs.push_back(strip_reference_edges(dg.graph));
  OriginConfig oc;
  oc.alpha = o.alpha;
  oc.gamma_init = o.gamma;
  oc.max_iterations = o.em_iters;
  auto training = train_origin_model(graphs, oc);
  save_model(o.model, training.model);
  std::cout << json{{"iterations", training.iterations},
                    {"converged", training.converged},
                    {"gamma", training.model.gamma},
                    {"loglik_trace", training.loglik_trace}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_evaluate(const Options& o) {
  require_path(o.graphs, "--graphs");
  require_path(o.corpus, "--corpus");
  auto corpus = load_corpus(o.corpus);
  auto predicted = read_graph_dir(o.graphs);
  std::vector<std::vector<EntityMention>> mentions;
  if (!o.mentions.empty()) {
    require_path(o.mentions, "--mentions");
    auto by_doc = read_mentions_file(o.mentions);
    for (const auto& dg : predicted) mentions.push_back(by_doc[dg.doc_id]);
  }
  auto report = evaluate_against(corpus, predicted, o.mentions.empty() ? nullptr : &mentions);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    open_out(fs::path(o.out) / "metrics.json") << report_to_json(report).dump(2) << '\n';
  }
  std::cout << format_report_table(report, o.inducer);
  return 0;
}

int cmd_pipeline(const Options& o) {
  PipelineConfig c = make_config(o);
  c.tagger_model = opt_path(o.model);
  Diagnostics diag;
  auto result = run_pipeline(c, diag);
  if (result.report) std::cout << format_report_table(*result.report, std::string(inducer_name(c.inducer)));
  std::cout << "graphs written: " << result.graphs.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action graph extraction from synthesis procedures"};
  app.set_version_flag("--version", SYNTHOGRAPH_VERSION);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--corpus", o.corpus, "corpus JSONL");
    sub->add_option("--embeddings", o.embeddings, "word vectors, text format");
    sub->add_option("--lexicons", o.lexicons, "directory of lexicon files");
    sub->add_option("--tagger", o.tagger, "independent|crf");
    sub->add_option("--inducer", o.inducer, "sequential|generative");
    sub->add_option("--model", o.model, "model file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--lambda", o.lambda, "L2 penalty");
    sub->add_option("--alpha", o.alpha, "emission smoothing");
    sub->add_option("--gamma", o.gamma, "initial distance decay");
    sub->add_option("--max-iters", o.max_iters, "optimizer iteration cap");
    sub->add_option("--em-iters", o.em_iters, "hard EM iteration cap");
    sub->add_option("--graphs", o.graphs, "directory of *.graph.json");
    sub->add_option("--mentions", o.mentions, "mentions JSONL written by tag");
    sub->add_option("--screener-model", o.screener_model, "screener model file");
    sub->add_option("--origin-model", o.origin_model, "origin model file");
    sub->add_flag("--perfect-nodes", o.perfect_nodes, "use gold nodes and association edges");
  };

  std::map<CLI::App*, int (*)(const Options&)> handlers;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    handlers[sub] = fn;
  };
  add("screen", "score paragraphs and select the synthesis procedure", cmd_screen);
  add("train-tagger", "train an entity tagger on gold mentions", cmd_train_tagger);
  add("tag", "tag entity mentions", cmd_tag);
  add("extract", "build graphs without reference edges", cmd_extract);
  add("induce", "add reference edges to graphs", cmd_induce);
  add("train-origin", "fit the origin model by hard EM", cmd_train_origin);
  add("evaluate", "score graphs against gold", cmd_evaluate);
  add("pipeline", "run every stage end to end", cmd_pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& [sub, fn] : handlers) {
      if (sub->parsed()) return fn(o);
    }
  } catch (const StageError& e) {
    std::cerr << e.to_json().dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"stage", "unknown"}, {"doc_id", ""}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return 0;
}
