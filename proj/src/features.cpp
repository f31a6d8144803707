#include "synthograph/features.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "synthograph/error.hpp"

namespace synthograph {

namespace {

// Splits UTF-8 into code points so affixes never cut a multibyte sequence.
std::vector<std::string_view> code_points(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

char char_class(std::string_view cp) {
  if (cp.size() != 1) return 'P';
  const auto c = static_cast<unsigned char>(cp[0]);
  if (std::isupper(c)) return 'U';
  if (std::islower(c)) return 'L';
  if (std::isdigit(c)) return 'D';
  return 'P';
}

}  // namespace

std::string word_shape(std::string_view word) {
  std::string out;
  for (auto cp : code_points(word)) {
    const char k = char_class(cp);
    if (out.empty() || out.back() != k) out += k;
  }
  return out;
}

std::string capitalization_class(std::string_view word) {
  int upper = 0, lower = 0;
  for (char ch : word) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isupper(c)) ++upper;
    if (std::islower(c)) ++lower;
  }
  if (upper == 0 && lower == 0) return "none";
  if (upper == 0) return "lower";
  if (lower == 0) return "allcap";
  if (std::isupper(static_cast<unsigned char>(word[0])) && upper == 1) return "initcap";
  return "mixed";
}

SentenceFeatures extract_features(const Sentence& sentence, const LexiconSet& lex, const EmbeddingTable& emb) {
  const int T = sentence.size();
  SentenceFeatures out;
  out.sparse.resize(T);
  out.dense.resize(T, emb.dimension());

  std::vector<std::string> lower(T);
  for (int t = 0; t < T; ++t) lower[t] = to_lower(sentence.tokens[t].surface);

  for (int t = 0; t < T; ++t) {
    const Token& tok = sentence.tokens[t];
    auto& f = out.sparse[t];
    f.emplace_back("bias");
    for (int k = -2; k <= 2; ++k) {
      const int u = t + k;
      const std::string w = u < 0 ? "<s>" : u >= T ? "</s>" : lower[u];
      f.push_back("w[" + std::to_string(k) + "]=" + w);
    }
    f.push_back("shape=" + word_shape(tok.surface));
    const auto cps = code_points(lower[t]);
    for (std::size_t n = 1; n <= 3 && n <= cps.size(); ++n) {
      std::string pre, suf;
      for (std::size_t i = 0; i < n; ++i) pre += cps[i];
      for (std::size_t i = cps.size() - n; i < cps.size(); ++i) suf += cps[i];
      f.push_back("prefix" + std::to_string(n) + "=" + pre);
      f.push_back("suffix" + std::to_string(n) + "=" + suf);
    }
    if (std::any_of(tok.surface.begin(), tok.surface.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      f.emplace_back("has_digit");
    f.push_back("cap=" + capitalization_class(tok.surface));
    for (int k = -1; k <= 1; ++k) {
      const int u = t + k;
      const std::string p = u < 0 ? "<s>" : u >= T ? "</s>" : sentence.tokens[u].pos;
      f.push_back("pos[" + std::to_string(k) + "]=" + p);
    }
    f.push_back("dep=" + tok.dep_label);
    f.push_back("lemma=" + to_lower(tok.lemma));
    std::set<std::string> hits;
    for (auto& name : lex.lexicons_containing(tok.surface)) hits.insert(name);
    for (auto& name : lex.lexicons_containing(tok.lemma)) hits.insert(name);
    for (const auto& name : hits) f.push_back("lex=" + name);

    if (emb.dimension() > 0) out.dense.row(t) = emb.lookup(tok.surface).transpose();
  }
  return out;
}

FeatureVectorizer::FeatureVectorizer(std::vector<std::string> names, int embedding_dimension)
    : names_(std::move(names)), embedding_dimension_(embedding_dimension) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!ids_.emplace(names_[i], static_cast<int>(i)).second)
      throw Error("duplicate feature name '" + names_[i] + "'");
  }
}

FeatureVectorizer FeatureVectorizer::fit(std::span<const SentenceFeatures> data, int embedding_dimension) {
  std::set<std::string> all;
  for (const auto& s : data) {
    for (const auto& tok : s.sparse) all.insert(tok.begin(), tok.end());
  }
  return FeatureVectorizer(std::vector<std::string>(all.begin(), all.end()), embedding_dimension);
}

std::optional<int> FeatureVectorizer::id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

EncodedSentence FeatureVectorizer::encode(const SentenceFeatures& features) const {
  EncodedSentence out;
  out.sparse.resize(features.sparse.size());
  for (std::size_t t = 0; t < features.sparse.size(); ++t) {
    for (const auto& name : features.sparse[t]) {
      if (auto i = id(name)) out.sparse[t].push_back(*i);
    }
  }
  if (features.dense.cols() == embedding_dimension_) {
    out.dense = features.dense;
  } else if (embedding_dimension_ == 0) {
    out.dense.resize(features.size(), 0);
  } else {
    throw Error("dense feature width " + std::to_string(features.dense.cols()) + " does not match model dimension " +
                std::to_string(embedding_dimension_));
  }
  return out;
}

}  // namespace synthograph
