#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "synthograph/action_graph.hpp"
#include "synthograph/labels.hpp"

namespace synthograph {

/// Dependency head of the sentence root.
inline constexpr int kRootHead = -1;

struct Token {
  std::string surface;
  std::string pos;
  std::string lemma;
  int dep_head = kRootHead;
  std::string dep_label;

  bool is_root() const { return dep_head == kRootHead; }
  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  int sent_id = 0;

  int size() const { return static_cast<int>(tokens.size()); }
  bool empty() const { return tokens.empty(); }
  /// Index of the ROOT token, or -1 for an empty sentence.
  int root() const;
  /// Dependency depth of every token (root = 0). Requires a valid tree.
  std::vector<int> depths() const;
  /// Token indices of the subtree headed by `head`, ascending.
  std::vector<int> subtree(int head) const;

  bool operator==(const Sentence&) const = default;
};

/// A parsed document. Sentences are stored flat in reading order with
/// `sent_id == index`; paragraphs are contiguous sentence ranges.
struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
  std::vector<std::size_t> paragraph_offsets{0};  // size = paragraphs + 1
  std::optional<std::vector<EntityMention>> gold_mentions;
  std::optional<ActionGraph> gold_graph;
  std::optional<std::vector<bool>> synthesis_labels;

  std::size_t paragraph_count() const { return paragraph_offsets.size() - 1; }
  std::span<const Sentence> paragraph(std::size_t p) const;
  void add_paragraph(std::vector<Sentence> paragraph);
  std::size_t token_count() const;

  bool operator==(const Document&) const = default;
};

/// Throws ValidationError naming the document and sentence on any invariant breach.
void validate_sentence(const Sentence& s, const std::string& doc_id);
void validate_document(const Document& doc);

Document document_from_json(const nlohmann::json& j, std::size_t line = 0);
nlohmann::json document_to_json(const Document& doc);

/// Reads the line-delimited document format. Blank lines are skipped.
std::vector<Document> read_corpus(std::istream& in);
std::vector<Document> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const Document> docs);
void save_corpus(const std::filesystem::path& path, std::span<const Document> docs);

/// Word vectors loaded from "word v1 ... vD" lines. Lookups fall back to the
/// lowercased form, then to the unknown-word vector (mean of all entries).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(int dimension, std::unordered_map<std::string, Eigen::VectorXd> entries);

  int dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& word) const;
  const Eigen::VectorXd& lookup(const std::string& word) const;
  const Eigen::VectorXd& unknown() const { return unknown_; }

 private:
  int dimension_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd> entries_;
  Eigen::VectorXd unknown_;
};

EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

/// Named case-insensitive word lists.
class LexiconSet {
 public:
  void add(const std::string& name, std::string_view term);
  /// Creates an empty lexicon if absent.
  void ensure(const std::string& name);
  bool member(const std::string& name, std::string_view term) const;
  /// Names of every lexicon containing `term`, sorted.
  std::vector<std::string> lexicons_containing(std::string_view term) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return lexicons_.size(); }
  std::size_t lexicon_size(const std::string& name) const;

 private:
  std::map<std::string, std::set<std::string>> lexicons_;
};

LexiconSet load_lexicons(const std::filesystem::path& dir);

/// Bijection (sent_id, offset) <-> document-level token index in reading order.
class TokenIndex {
 public:
  TokenIndex() = default;
  explicit TokenIndex(const Document& doc);

  int to_global(int sent_id, int offset) const;
  std::pair<int, int> to_local(int global) const;
  int size() const { return total_; }
  int sentence_count() const { return static_cast<int>(sentence_offsets_.size()); }
  int sentence_length(int sent_id) const;

 private:
  std::vector<int> sentence_offsets_;
  std::vector<int> sentence_lengths_;
  int total_ = 0;
};

TokenIndex global_token_index(const Document& doc);

/// ASCII lowercase; multibyte UTF-8 sequences pass through unchanged.
std::string to_lower(std::string_view s);

/// Fallback whitespace + punctuation tokenizer for raw text.
std::vector<std::string> tokenize(std::string_view text);
/// Builds a document from raw text: one paragraph per blank-line block,
/// sentences split after . ! ?, and a flat parse (first token is ROOT,
/// every other token attaches to it with label "dep").
Document document_from_text(std::string doc_id, std::string_view text);

}  // namespace synthograph
