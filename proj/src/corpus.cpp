#include "synthograph/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "synthograph/error.hpp"

namespace synthograph {

using nlohmann::json;

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sentence / Document

int Sentence::root() const {
  for (int i = 0; i < size(); ++i) {
    if (tokens[i].is_root()) return i;
  }
  return -1;
}

std::vector<int> Sentence::depths() const {
  std::vector<int> depth(tokens.size(), -1);
  for (int i = 0; i < size(); ++i) {
    std::vector<int> path;
    int cur = i;
    while (cur != kRootHead && depth[cur] < 0) {
      path.push_back(cur);
      cur = tokens[cur].dep_head;
    }
    int d = cur == kRootHead ? -1 : depth[cur];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
  }
  return depth;
}

std::vector<int> Sentence::subtree(int head) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    int cur = i;
    while (cur != kRootHead && cur != head) cur = tokens[cur].dep_head;
    if (cur == head) out.push_back(i);
  }
  return out;
}

std::span<const Sentence> Document::paragraph(std::size_t p) const {
  const std::size_t b = paragraph_offsets.at(p);
  const std::size_t e = paragraph_offsets.at(p + 1);
  return std::span<const Sentence>(sentences).subspan(b, e - b);
}

void Document::add_paragraph(std::vector<Sentence> paragraph) {
  for (auto& s : paragraph) {
    s.sent_id = static_cast<int>(sentences.size());
    sentences.push_back(std::move(s));
  }
  paragraph_offsets.push_back(sentences.size());
}

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

void validate_sentence(const Sentence& s, const std::string& doc_id) {
  const std::string where = "document '" + doc_id + "' sentence " + std::to_string(s.sent_id) + ": ";
  if (s.empty()) throw ValidationError(where + "sentence has no tokens");
  int roots = 0;
  for (int i = 0; i < s.size(); ++i) {
    const Token& t = s.tokens[i];
    if (t.surface.empty()) throw ValidationError(where + "token " + std::to_string(i) + " has an empty surface");
    if (t.is_root()) {
      ++roots;
    } else if (t.dep_head < 0 || t.dep_head >= s.size() || t.dep_head == i) {
      throw ValidationError(where + "token " + std::to_string(i) + " has invalid dependency head " +
                            std::to_string(t.dep_head));
    }
  }
  if (roots != 1) throw ValidationError(where + "expected exactly one ROOT token, found " + std::to_string(roots));
  for (int i = 0; i < s.size(); ++i) {
    int cur = i;
    for (int steps = 0; cur != kRootHead; ++steps) {
      if (steps > s.size()) throw ValidationError(where + "dependency arcs contain a cycle through token " + std::to_string(i));
      cur = s.tokens[cur].dep_head;
    }
  }
}

void validate_document(const Document& doc) {
  const std::string where = "document '" + doc.doc_id + "': ";
  if (doc.paragraph_offsets.empty() || doc.paragraph_offsets.front() != 0 ||
      doc.paragraph_offsets.back() != doc.sentences.size() ||
      !std::is_sorted(doc.paragraph_offsets.begin(), doc.paragraph_offsets.end()))
    throw ValidationError(where + "paragraph offsets do not cover the sentence list");
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (doc.sentences[i].sent_id != static_cast<int>(i))
      throw ValidationError(where + "sentence " + std::to_string(i) + " has sent_id " +
                            std::to_string(doc.sentences[i].sent_id));
    validate_sentence(doc.sentences[i], doc.doc_id);
  }
  auto check_span = [&](int sent_id, int start, int end, const std::string& what) {
    if (sent_id < 0 || sent_id >= static_cast<int>(doc.sentences.size()))
      throw ValidationError(where + what + " references missing sentence " + std::to_string(sent_id));
    const int len = doc.sentences[sent_id].size();
    if (start < 0 || start >= end || end > len)
      throw ValidationError(where + what + " span [" + std::to_string(start) + "," + std::to_string(end) +
                            ") out of range for sentence " + std::to_string(sent_id) + " of length " +
                            std::to_string(len));
  };
  if (doc.gold_mentions) {
    for (const auto& m : *doc.gold_mentions) check_span(m.sent_id, m.start, m.end, "gold mention");
  }
  if (doc.gold_graph) {
    for (const auto& n : doc.gold_graph->nodes) {
      if (n.span) check_span(n.span->sent_id, n.span->start, n.span->end, "gold graph node " + std::to_string(n.id));
    }
    auto v = graph_violations(*doc.gold_graph);
    if (!v.empty()) throw ValidationError(where + "gold graph: " + v.front());
  }
  if (doc.synthesis_labels && doc.synthesis_labels->size() != doc.paragraph_count())
    throw ValidationError(where + "synthesis_labels has " + std::to_string(doc.synthesis_labels->size()) +
                          " entries for " + std::to_string(doc.paragraph_count()) + " paragraphs");
}

// ---------------------------------------------------------------------------
// JSON records

namespace {

const json& require(const json& j, const char* key, std::size_t line, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(line, ctx + key, "missing field");
  return j.at(key);
}

std::string string_field(const json& j, const char* key, std::size_t line, const std::string& ctx) {
  const json& v = require(j, key, line, ctx);
  if (!v.is_string()) throw ParseError(line, ctx + key, "expected string");
  return v.get<std::string>();
}

int int_field(const json& j, const char* key, std::size_t line, const std::string& ctx) {
  const json& v = require(j, key, line, ctx);
  if (!v.is_number_integer()) throw ParseError(line, ctx + key, "expected integer");
  return v.get<int>();
}

}  // namespace

Document document_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "", "expected a document object");
  Document doc;
  doc.doc_id = string_field(j, "doc_id", line, "");
  const json& paragraphs = require(j, "paragraphs", line, "");
  if (!paragraphs.is_array()) throw ParseError(line, "paragraphs", "expected array");
  for (const auto& jp : paragraphs) {
    if (!jp.is_array()) throw ParseError(line, "paragraphs", "expected array of sentences");
    std::vector<Sentence> para;
    for (const auto& js : jp) {
      if (!js.is_array()) throw ParseError(line, "paragraphs", "expected array of tokens");
      Sentence s;
      for (const auto& jt : js) {
        Token t;
        t.surface = string_field(jt, "surface", line, "token.");
        t.pos = string_field(jt, "pos", line, "token.");
        t.lemma = string_field(jt, "lemma", line, "token.");
        t.dep_head = int_field(jt, "dep_head", line, "token.");
        t.dep_label = string_field(jt, "dep_label", line, "token.");
        s.tokens.push_back(std::move(t));
      }
      para.push_back(std::move(s));
    }
    doc.add_paragraph(std::move(para));
  }
  if (j.contains("gold_mentions") && !j.at("gold_mentions").is_null()) {
    const json& jm = j.at("gold_mentions");
    if (!jm.is_array()) throw ParseError(line, "gold_mentions", "expected array");
    std::vector<EntityMention> mentions;
    for (const auto& m : jm) {
      EntityMention em;
      em.sent_id = int_field(m, "sent_id", line, "gold_mentions.");
      em.start = int_field(m, "start", line, "gold_mentions.");
      em.end = int_field(m, "end", line, "gold_mentions.");
      auto label = parse_label(string_field(m, "label", line, "gold_mentions."));
      if (!label) throw ParseError(line, "gold_mentions.label", "unknown entity label");
      em.label = *label;
      mentions.push_back(em);
    }
    doc.gold_mentions = std::move(mentions);
  }
  if (j.contains("gold_graph") && !j.at("gold_graph").is_null()) {
    doc.gold_graph = graph_from_json(j.at("gold_graph"), line);
  }
  if (j.contains("synthesis_labels") && !j.at("synthesis_labels").is_null()) {
    const json& jl = j.at("synthesis_labels");
    if (!jl.is_array()) throw ParseError(line, "synthesis_labels", "expected array");
    std::vector<bool> labels;
    for (const auto& b : jl) {
      if (!b.is_boolean()) throw ParseError(line, "synthesis_labels", "expected boolean");
      labels.push_back(b.get<bool>());
    }
    doc.synthesis_labels = std::move(labels);
  }
  return doc;
}

json document_to_json(const Document& doc) {
  json paragraphs = json::array();
  for (std::size_t p = 0; p < doc.paragraph_count(); ++p) {
    json jp = json::array();
    for (const auto& s : doc.paragraph(p)) {
      json js = json::array();
      for (const auto& t : s.tokens) {
        js.push_back({{"surface", t.surface},
                      {"pos", t.pos},
                      {"lemma", t.lemma},
                      {"dep_head", t.dep_head},
                      {"dep_label", t.dep_label}});
      }
      jp.push_back(std::move(js));
    }
    paragraphs.push_back(std::move(jp));
  }
  json j = {{"doc_id", doc.doc_id}, {"paragraphs", std::move(paragraphs)}};
  if (doc.gold_mentions) {
    json jm = json::array();
    for (const auto& m : *doc.gold_mentions)
      jm.push_back({{"sent_id", m.sent_id}, {"start", m.start}, {"end", m.end}, {"label", label_name(m.label)}});
    j["gold_mentions"] = std::move(jm);
  }
  if (doc.gold_graph) j["gold_graph"] = graph_to_json(*doc.gold_graph);
  if (doc.synthesis_labels) j["synthesis_labels"] = *doc.synthesis_labels;
  return j;
}

std::vector<Document> read_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, "", e.what());
    }
    Document doc = document_from_json(j, lineno);
    validate_document(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path.string() + "'");
  return read_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const Document> docs) {
  for (const auto& d : docs) out << document_to_json(d).dump() << '\n';
}

void save_corpus(const std::filesystem::path& path, std::span<const Document> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file '" + path.string() + "'");
  write_corpus(out, docs);
}

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingTable::EmbeddingTable(int dimension, std::unordered_map<std::string, Eigen::VectorXd> entries)
    : dimension_(dimension), entries_(std::move(entries)), unknown_(Eigen::VectorXd::Zero(dimension)) {
  if (entries_.empty()) return;
  // Sum in sorted key order so the mean does not depend on hash layout.
  std::vector<const std::string*> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, v] : entries_) keys.push_back(&k);
  std::sort(keys.begin(), keys.end(), [](auto* a, auto* b) { return *a < *b; });
  for (const auto* k : keys) unknown_ += entries_.at(*k);
  unknown_ /= static_cast<double>(entries_.size());
}

bool EmbeddingTable::contains(const std::string& word) const { return entries_.count(word) > 0; }

const Eigen::VectorXd& EmbeddingTable::lookup(const std::string& word) const {
  if (auto it = entries_.find(word); it != entries_.end()) return it->second;
  if (auto it = entries_.find(to_lower(word)); it != entries_.end()) return it->second;
  return unknown_;
}

EmbeddingTable read_embeddings(std::istream& in) {
  std::unordered_map<std::string, Eigen::VectorXd> entries;
  int dim = -1;
  int header_dim = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (lineno == 1) {
      // optional word2vec "count dim" header
      std::istringstream hs(line);
      long long count = -1, hd = -1;
      std::string rest;
      if (hs >> count >> hd && !(hs >> rest) && count >= 0 && hd > 0 &&
          word.find_first_not_of("0123456789") == std::string::npos) {
        header_dim = static_cast<int>(hd);
        continue;
      }
    }
    std::vector<double> values;
    std::string field;
    while (ls >> field) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size())
        throw ParseError(lineno, "value " + std::to_string(values.size() + 1), "non-numeric field '" + field + "'");
      values.push_back(v);
    }
    if (values.empty()) throw ParseError(lineno, "vector", "entry '" + word + "' has no values");
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim)
      throw ParseError(lineno, "vector", "expected dimension " + std::to_string(dim) + ", found " +
                                             std::to_string(values.size()));
    entries[word] = Eigen::Map<const Eigen::VectorXd>(values.data(), dim);
  }
  if (dim < 0) throw ParseError(0, "", "embedding file is empty; dimension undefined");
  if (header_dim > 0 && header_dim != dim)
    throw ParseError(1, "header", "declares dimension " + std::to_string(header_dim) + ", vectors have " +
                                      std::to_string(dim));
  return EmbeddingTable(dim, std::move(entries));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file '" + path.string() + "'");
  return read_embeddings(in);
}

// ---------------------------------------------------------------------------
// Lexicons

void LexiconSet::add(const std::string& name, std::string_view term) { lexicons_[name].insert(to_lower(term)); }

void LexiconSet::ensure(const std::string& name) { lexicons_[name]; }

bool LexiconSet::member(const std::string& name, std::string_view term) const {
  auto it = lexicons_.find(name);
  return it != lexicons_.end() && it->second.count(to_lower(term)) > 0;
}

std::vector<std::string> LexiconSet::lexicons_containing(std::string_view term) const {
  const std::string key = to_lower(term);
  std::vector<std::string> out;
  for (const auto& [name, terms] : lexicons_) {
    if (terms.count(key)) out.push_back(name);
  }
  return out;
}

std::vector<std::string> LexiconSet::names() const {
  std::vector<std::string> out;
  for (const auto& [name, terms] : lexicons_) out.push_back(name);
  return out;
}

std::size_t LexiconSet::lexicon_size(const std::string& name) const {
  auto it = lexicons_.find(name);
  return it == lexicons_.end() ? 0 : it->second.size();
}

LexiconSet load_lexicons(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error("cannot read lexicon directory '" + dir.string() + "'");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw Error("cannot read lexicon directory '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());

  LexiconSet lex;
  for (const auto& f : files) {
    const std::string name = f.stem().string();
    std::ifstream in(f);
    if (!in) throw Error("cannot open lexicon file '" + f.string() + "'");
    lex.ensure(name);
    std::string line;
    while (std::getline(in, line)) {
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = line.find_last_not_of(" \t\r");
      lex.add(name, std::string_view(line).substr(b, e - b + 1));
    }
  }
  return lex;
}

// ---------------------------------------------------------------------------
// Token index

TokenIndex::TokenIndex(const Document& doc) {
  for (const auto& s : doc.sentences) {
    sentence_offsets_.push_back(total_);
    sentence_lengths_.push_back(s.size());
    total_ += s.size();
  }
}

int TokenIndex::to_global(int sent_id, int offset) const {
  if (sent_id < 0 || sent_id >= sentence_count()) throw Error("sentence " + std::to_string(sent_id) + " out of range");
  if (offset < 0 || offset > sentence_lengths_[sent_id]) throw Error("token offset " + std::to_string(offset) + " out of range");
  return sentence_offsets_[sent_id] + offset;
}

std::pair<int, int> TokenIndex::to_local(int global) const {
  if (global < 0 || global >= total_) throw Error("token index " + std::to_string(global) + " out of range");
  auto it = std::upper_bound(sentence_offsets_.begin(), sentence_offsets_.end(), global);
  int s = static_cast<int>(it - sentence_offsets_.begin()) - 1;
  // Skip empty sentences sharing the same offset.
  while (sentence_lengths_[s] == 0) --s;
  return {s, global - sentence_offsets_[s]};
}

int TokenIndex::sentence_length(int sent_id) const { return sentence_lengths_.at(sent_id); }

TokenIndex global_token_index(const Document& doc) { return TokenIndex(doc); }

}  // namespace synthograph
