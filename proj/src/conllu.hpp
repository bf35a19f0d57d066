#ifndef ARBOR_CONLLU_HPP
#define ARBOR_CONLLU_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace arbor {

inline constexpr int kHeadUnset = -1;

struct Feat {
  std::string key;
  std::string value;
  friend bool operator==(const Feat&, const Feat&) = default;
};

// One syntactic word, ten CoNLL-U columns. FEATS is kept parsed and
// key-sorted; DEPS and MISC are opaque passthrough strings.
struct Token {
  int id = 0;
  std::string form = "_";
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::vector<Feat> feats;
  int head = kHeadUnset;  // 0 denotes the artificial root
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";
  friend bool operator==(const Token&, const Token&) = default;
};

// Multiword-token range line ("a-b"), stored as passthrough.
struct MwtRange {
  int start = 0;
  int end = 0;
  std::string form;
  friend bool operator==(const MwtRange&, const MwtRange&) = default;
};

struct Sentence {
  std::vector<std::string> comments;  // full lines, '#' included
  std::vector<Token> tokens;
  std::vector<MwtRange> mwt_ranges;

  int size() const { return static_cast<int>(tokens.size()); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Treebank {
  std::string name;
  std::vector<Sentence> sentences;

  std::size_t sentence_count() const { return sentences.size(); }
  std::size_t token_count() const;
};

class ParseError : public Error {
 public:
  enum class Kind {
    MalformedLine,
    NonContiguousIds,
    HeadOutOfRange,
    EmptyNodeUnsupported,
  };

  ParseError(Kind kind, std::size_t line, const std::string& msg);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

Treebank parse_conllu(std::string_view text, std::string name);
std::string serialize_conllu(const Treebank& tb);
void append_sentence(std::string& out, const Sentence& s);

// FEATS helpers. Canonical order is alphabetical by key, case-insensitive.
std::string serialize_feats(const std::vector<Feat>& feats);
std::vector<Feat> parse_feats(std::string_view column);  // "_" -> empty
void sort_feats(std::vector<Feat>& feats);

struct TreeCheck {
  enum class Kind { Ok, MultipleRoots, NoRoot, Cycle };
  Kind kind = Kind::Ok;
  std::vector<int> cycle;  // ascending token ids when kind == Cycle

  bool ok() const { return kind == Kind::Ok; }
};

// heads[i] is the head of token i+1; all heads must be set and in 0..n.
TreeCheck validate_heads(std::span<const int> heads);
TreeCheck validate_tree(const Sentence& s);

bool is_universal_upos(std::string_view tag);
std::string_view universal_deprel(std::string_view deprel);

}  // namespace arbor

#endif
