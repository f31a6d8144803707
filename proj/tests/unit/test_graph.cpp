#include <doctest.h>

#include "support/synthetic.hpp"
#include "synthograph/error.hpp"
#include "synthograph/graph.hpp"

using namespace synthograph;

namespace {

Event event(int sent, std::optional<TokenSpan> op, std::vector<EventArgument> args = {}) {
  return {sent, 0, op, std::move(args), !op};
}

EventArgument arg(SemType t, int sent, int start, int end) { return {t, TokenSpan{sent, start, end}, false}; }

std::vector<std::pair<int, int>> refs(const ActionGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : g.reference_edges) out.emplace_back(e.node_id, e.op_id);
  return out;
}

}  // namespace

TEST_CASE("assembly") {
  CHECK(assemble_graph({}) == ActionGraph{});
  const std::vector<Event> one = {event(0, TokenSpan{0, 1, 2},
                                        {arg(SemType::kRawMaterial, 0, 3, 4), arg(SemType::kApparatus, 0, 5, 7)})};
  const auto g = assemble_graph(one);
  CHECK(g.nodes.size() == 3);
  CHECK(g.association_edges.size() == 2);
  CHECK(g.reference_edges.empty());
  CHECK(graph_violations(g).empty());
}

TEST_CASE("stir, appear, filter: association and sequential reference edges") {
  // stirring | appeared + black solid | filtered + black slurry
  const std::vector<Event> ev = {
      event(0, TokenSpan{0, 0, 1}),
      event(1, TokenSpan{1, 2, 3}, {arg(SemType::kIntermediate, 1, 0, 2)}),
      event(2, TokenSpan{2, 3, 4}, {arg(SemType::kIntermediate, 2, 0, 2)}),
  };
  const auto g = assemble_graph(ev);
  // node ids: 0 stirring, 1 appeared, 2 black solid, 3 filtered, 4 black slurry
  CHECK(g.association_edges == std::vector<AssociationEdge>{{1, 2}, {3, 4}});
  const auto s = induce_edges_sequential(g);
  CHECK(refs(s) == std::vector<std::pair<int, int>>{{2, 0}, {4, 1}});
  CHECK(graph_violations(s).empty());
}

TEST_CASE("first-event intermediate is raw") {
  const std::vector<Event> ev = {event(0, TokenSpan{0, 3, 4}, {arg(SemType::kIntermediate, 0, 0, 2)})};
  const auto s = induce_edges_sequential(assemble_graph(ev));
  CHECK(s.reference_edges.empty());
  CHECK(s.nodes[1].raw);
}

TEST_CASE("k-event chain gives k-1 reference edges") {
  for (int k = 1; k <= 6; ++k) {
    std::vector<Event> ev;
    for (int i = 0; i < k; ++i) {
      std::vector<EventArgument> a;
      if (i > 0) a.push_back(arg(SemType::kIntermediate, i, 0, 1));
      a.push_back(arg(SemType::kRawMaterial, i, 2, 3));
      ev.push_back(event(i, TokenSpan{i, 1, 2}, a));
    }
    const auto s = induce_edges_sequential(assemble_graph(ev));
    CHECK(static_cast<int>(s.reference_edges.size()) == k - 1);
    CHECK(graph_violations(s).empty());
  }
}

TEST_CASE("sequential inducer skips events without an operation") {
  const std::vector<Event> ev = {
      event(0, TokenSpan{0, 0, 1}),
      event(1, std::nullopt),
      event(2, TokenSpan{2, 0, 1}, {{SemType::kApparatus, std::nullopt, true}}),
  };
  const auto s = induce_edges_sequential(assemble_graph(ev));
  CHECK(refs(s) == std::vector<std::pair<int, int>>{{2, 0}});
}

TEST_CASE("validator catches each invariant") {
  const std::vector<Event> ev = {
      event(0, TokenSpan{0, 0, 1}, {arg(SemType::kRawMaterial, 0, 1, 2)}),
      event(1, TokenSpan{1, 0, 1}, {arg(SemType::kIntermediate, 1, 1, 2), {SemType::kApparatus, std::nullopt, true}}),
  };
  const auto good = induce_edges_sequential(assemble_graph(ev));
  REQUIRE(graph_violations(good).empty());
  // ids: 0 op0, 1 raw, 2 op1, 3 intermediate, 4 implicit apparatus

  auto twice = good;
  twice.reference_edges.push_back({3, 0, SemType::kIntermediate});
  CHECK_FALSE(graph_violations(twice).empty());

  auto forward = good;
  forward.reference_edges = {{3, 2, SemType::kIntermediate}};
  CHECK_FALSE(graph_violations(forward).empty());

  auto raw_edge = good;
  raw_edge.reference_edges.push_back({1, 0, SemType::kRawMaterial});
  CHECK_FALSE(graph_violations(raw_edge).empty());

  auto wrong_type = good;
  wrong_type.reference_edges[0].sem_type = SemType::kApparatus;
  CHECK_FALSE(graph_violations(wrong_type).empty());

  auto cross = good;
  cross.association_edges.push_back({0, 3});
  CHECK_FALSE(graph_violations(cross).empty());

  auto bad_id = good;
  bad_id.nodes[1].id = 7;
  CHECK_FALSE(graph_violations(bad_id).empty());

  auto flagged = good;
  flagged.nodes[3].raw = true;
  CHECK_FALSE(graph_violations(flagged).empty());

  CHECK_THROWS_AS(validate_graph(twice), ValidationError);
}

TEST_CASE("json round trip and errors") {
  synth::Rng rng(3);
  const Document d = synth::sequential_procedure(rng, "p", 6);
  const ActionGraph& g = *d.gold_graph;
  CHECK(graph_from_json(graph_to_json(g)) == g);
  auto j = graph_to_json(g);
  j["nodes"][0]["kind"] = "verb";
  CHECK_THROWS_AS(graph_from_json(j), ParseError);
  CHECK_THROWS_AS(graph_from_json(nlohmann::json::object()), ParseError);
}

TEST_CASE("head lemmas") {
  Document doc;
  doc.add_paragraph({synth::parse("The|DT|3|det black|JJ|3|amod solid|NN|4|nsubj formed|VBD|0|root")});
  doc.sentences[0].tokens[3].lemma = "form";
  const std::vector<Event> ev = {
      event(0, TokenSpan{0, 3, 4}, {arg(SemType::kIntermediate, 0, 1, 3), {SemType::kApparatus, std::nullopt, true}})};
  auto g = assemble_graph(ev);
  attach_head_lemmas(g, doc);
  CHECK(g.nodes[0].lemma == "form");
  CHECK(g.nodes[1].lemma == "solid");
  CHECK(g.nodes[2].lemma == kImplicitLemma);
  CHECK(span_head(doc.sentences[0], TokenSpan{0, 0, 3}) == 2);
}

TEST_CASE("extraction from gold mentions rebuilds the synthetic gold nodes") {
  synth::Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const Document d = synth::sequential_procedure(rng, "p" + std::to_string(rep), 2 + rep % 9);
    const auto ev = extract_events(d.sentences, *d.gold_mentions, nullptr, d.doc_id);
    const auto g = assemble_graph(ev);
    CHECK(g == strip_reference_edges(*d.gold_graph));
    CHECK(induce_edges_sequential(g) == *d.gold_graph);
  }
}
