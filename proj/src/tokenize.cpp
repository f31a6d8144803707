#include <cctype>

#include "synthograph/corpus.hpp"

namespace synthograph {

namespace {

bool is_punct_byte(unsigned char c) { return c < 0x80 && std::ispunct(c) && c != '-' && c != '.'; }

bool sentence_final(const std::string& tok) { return tok == "." || tok == "!" || tok == "?"; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    // A trailing period is split off unless it is the whole token ("..." stays).
    if (cur.size() > 1 && cur.back() == '.' && cur.find_first_not_of('.') != std::string::npos) {
      cur.pop_back();
      out.push_back(cur);
      out.emplace_back(".");
    } else {
      out.push_back(cur);
    }
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (is_punct_byte(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

Document document_from_text(std::string doc_id, std::string_view text) {
  Document doc;
  doc.doc_id = std::move(doc_id);

  std::vector<std::string_view> blocks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find("\n\n", pos);
    if (next == std::string_view::npos) next = text.size();
    blocks.push_back(text.substr(pos, next - pos));
    pos = next + 2;
  }

  for (auto block : blocks) {
    std::vector<Sentence> para;
    Sentence cur;
    auto close = [&] {
      if (cur.tokens.empty()) return;
      for (std::size_t i = 0; i < cur.tokens.size(); ++i) {
        cur.tokens[i].dep_head = i == 0 ? kRootHead : 0;
        cur.tokens[i].dep_label = i == 0 ? "root" : "dep";
      }
      para.push_back(std::move(cur));
      cur = Sentence{};
    };
    for (auto& w : tokenize(block)) {
      Token t;
      t.surface = w;
      t.pos = "X";
      t.lemma = to_lower(w);
      cur.tokens.push_back(std::move(t));
      if (sentence_final(w)) close();
    }
    close();
    if (!para.empty()) doc.add_paragraph(std::move(para));
  }
  return doc;
}

}  // namespace synthograph
