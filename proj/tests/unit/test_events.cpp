#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "support/synthetic.hpp"
#include "synthograph/corpus.hpp"
#include "synthograph/events.hpp"

using namespace synthograph;

TEST_CASE("splitting fixtures") {
  std::ifstream in(std::string(SYNTHOGRAPH_FIXTURE_DIR) + "/event_splitting.jsonl");
  REQUIRE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const Sentence s = synth::parse(j.at("spec").get<std::string>(), 4);
    std::vector<EventPhrase> expected;
    for (const auto& p : j.at("phrases")) expected.push_back({4, p.at("tokens").get<std::vector<int>>(), p.at("head").get<int>()});
    INFO(j.at("name").get<std::string>());
    CHECK(split_sentence_events(s, j.at("operations").get<int>()) == expected);
    ++n;
  }
  CHECK(n >= 8);
}

TEST_CASE("phrases partition random sentences") {
  synth::Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const Document d = synth::random_document(rng, "r");
    for (const auto& s : d.sentences) {
      for (int ops : {0, 1, 2, 3}) {
        std::vector<int> seen(s.size(), 0);
        for (const auto& p : split_sentence_events(s, ops)) {
          for (int t : p.tokens) ++seen[t];
          CHECK(std::is_sorted(p.tokens.begin(), p.tokens.end()));
        }
        for (int c : seen) CHECK(c == 1);
      }
    }
  }
  CHECK(split_sentence_events(Sentence{}, 2).empty());
}

TEST_CASE("argument types") {
  CHECK(argument_type(EntityLabel::kMaterial) == SemType::kRawMaterial);
  CHECK(argument_type(EntityLabel::kTarget) == SemType::kRawMaterial);
  CHECK(argument_type(EntityLabel::kIntermed) == SemType::kIntermediate);
  CHECK(argument_type(EntityLabel::kSynthAprt) == SemType::kApparatus);
  CHECK_FALSE(argument_type(EntityLabel::kCharAprt));
  CHECK_FALSE(argument_type(EntityLabel::kOperation));
  CHECK_FALSE(argument_type(EntityLabel::kNumber));
}

TEST_CASE("build events") {
  const std::vector<EventPhrase> phrases = {{0, {0, 1, 2, 3}, 3}, {0, {4, 5}, 4}, {1, {0, 1, 2, 3}, 1}};
  const std::vector<EntityMention> mentions = {
      {0, 3, 4, EntityLabel::kOperation}, {0, 1, 3, EntityLabel::kIntermed}, {0, 0, 1, EntityLabel::kNumber},
      {0, 5, 6, EntityLabel::kTarget}, {0, 4, 5, EntityLabel::kOperation},
      {1, 1, 2, EntityLabel::kOperation}, {1, 2, 3, EntityLabel::kOperation}};
  Diagnostics diag(LogLevel::kOff);
  const auto ev = build_events(phrases, mentions, &diag, "d");
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].operation == TokenSpan{0, 3, 4});
  CHECK(ev[0].arguments == std::vector<EventArgument>{{SemType::kIntermediate, TokenSpan{0, 1, 3}, false}});
  CHECK(ev[1].arguments == std::vector<EventArgument>{{SemType::kRawMaterial, TokenSpan{0, 5, 6}, false}});
  CHECK(ev[2].operation == TokenSpan{1, 1, 2});
  CHECK(diag.counts().at("events/dropped_operation") == 1);

  const std::vector<EventPhrase> empty = {{2, {0, 1}, 0}};
  const auto deg = build_events(empty, {}, &diag, "d");
  CHECK(deg[0].degenerate);
  CHECK_FALSE(deg[0].operation);
  CHECK(deg[0].arguments.empty());
  CHECK(diag.counts().at("events/degenerate_event") == 1);
}

TEST_CASE("implicit arguments") {
  Event first{0, 0, TokenSpan{0, 0, 1}, {}, false};
  Event sealed{1, 0, TokenSpan{1, 3, 4}, {{SemType::kApparatus, TokenSpan{1, 1, 2}, false}}, false};
  Event full{2, 0, TokenSpan{2, 0, 1},
             {{SemType::kIntermediate, TokenSpan{2, 1, 2}, false}, {SemType::kApparatus, TokenSpan{2, 2, 3}, false}},
             false};
  Event none{3, 0, std::nullopt, {}, true};
  const auto out = add_implicit_arguments({first, sealed, full, none});
  // first event: apparatus only
  CHECK(out[0].arguments == std::vector<EventArgument>{{SemType::kApparatus, std::nullopt, true}});
  // sealed: gains an implicit intermediate
  CHECK(out[1].arguments.size() == 2);
  CHECK(out[1].arguments[1] == EventArgument{SemType::kIntermediate, std::nullopt, true});
  CHECK(out[2] == full);
  CHECK(out[3] == none);
}

TEST_CASE("first operation-bearing event gets no implicit intermediate even after a degenerate one") {
  Event none{0, 0, std::nullopt, {}, true};
  Event first{1, 0, TokenSpan{1, 0, 1}, {{SemType::kApparatus, TokenSpan{1, 1, 2}, false}}, false};
  const auto out = add_implicit_arguments({none, first});
  CHECK(out[1] == first);
}

TEST_CASE("target mentions of the sample corpus become raw-material arguments") {
  const auto docs = load_corpus(std::string(SYNTHOGRAPH_SAMPLE_DIR) + "/corpus.jsonl");
  int targets = 0;
  for (const auto& d : docs) {
    const auto ev = extract_events(d.sentences, *d.gold_mentions, nullptr, d.doc_id);
    for (const auto& m : *d.gold_mentions) {
      if (m.label != EntityLabel::kTarget) continue;
      ++targets;
      bool found = false;
      for (const auto& e : ev)
        for (const auto& a : e.arguments)
          found = found || (a.span == TokenSpan{m.sent_id, m.start, m.end} && a.sem_type == SemType::kRawMaterial);
      CHECK(found);
    }
  }
  CHECK(targets >= 1);
}
