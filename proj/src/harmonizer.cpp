#include "harmonizer.hpp"

#include <array>
#include <sstream>

namespace arbor {

const std::vector<DepRule>& default_dep_rules() {
  static const std::vector<DepRule> rules = {
      {"ADJ", "*", "amod"},    {"ADV", "*", "advmod"}, {"NOUN", "VERB", "obl"},
      {"PROPN", "VERB", "obl"}, {"PRON", "VERB", "obl"}, {"NOUN", "*", "nmod"},
      {"PROPN", "*", "nmod"},   {"PRON", "*", "nmod"},   {"VERB", "*", "advcl"},
  };
  return rules;
}

std::vector<DepRule> parse_rule_table(std::string_view text) {
  std::vector<DepRule> rules;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    DepRule rule;
    std::string extra;
    if (!(fields >> rule.dep_upos)) continue;  // blank line
    if (!(fields >> rule.head_upos >> rule.new_deprel) || (fields >> extra))
      fail(ErrorCode::Malformed, "MalformedRule at line " + std::to_string(line_no) +
                                     ": expected 'DEP_UPOS HEAD_UPOS_OR_* NEW_DEPREL'");
    if (!is_universal_upos(rule.dep_upos))
      fail(ErrorCode::Malformed, "MalformedRule at line " + std::to_string(line_no) +
                                     ": '" + rule.dep_upos + "' is not a UPOS tag");
    if (rule.head_upos != "*" && !is_universal_upos(rule.head_upos))
      fail(ErrorCode::Malformed, "MalformedRule at line " + std::to_string(line_no) +
                                     ": '" + rule.head_upos + "' is not a UPOS tag or *");
    rules.push_back(std::move(rule));
  }
  return rules;
}

Sentence fixed_numerals_to_flat(Sentence s) {
  for (Token& tok : s.tokens) {
    if (universal_deprel(tok.deprel) != "fixed") continue;
    if (tok.upos != "NUM") continue;
    if (tok.head < 1 || tok.head > s.size()) continue;
    if (s.tokens[tok.head - 1].upos != "NUM") continue;
    tok.deprel = "flat";
  }
  return s;
}

Treebank fixed_numerals_to_flat(Treebank tb) {
  for (Sentence& s : tb.sentences) s = fixed_numerals_to_flat(std::move(s));
  return tb;
}

Sentence relabel_dep(Sentence s, std::span<const DepRule> rules) {
  for (Token& tok : s.tokens) {
    if (universal_deprel(tok.deprel) != "dep") continue;
    std::string_view head_upos =
        tok.head >= 1 && tok.head <= s.size() ? s.tokens[tok.head - 1].upos : "";
    for (const DepRule& rule : rules) {
      if (rule.dep_upos != tok.upos) continue;
      if (rule.head_upos != "*" && rule.head_upos != head_upos) continue;
      tok.deprel = rule.new_deprel;
      break;
    }
  }
  return s;
}

Treebank relabel_dep(Treebank tb, std::span<const DepRule> rules) {
  for (Sentence& s : tb.sentences) s = relabel_dep(std::move(s), rules);
  return tb;
}

namespace {

constexpr std::array<std::string_view, 6> kSentenceFinalPunct = {".", ",", ";",
                                                                 ":", "?", "!"};

bool ends_in_punctuation(const Sentence& s) {
  const Token& last = s.tokens.back();
  if (last.upos == "PUNCT") return true;
  for (std::string_view p : kSentenceFinalPunct)
    if (last.form == p) return true;
  return false;
}

}  // namespace

DummyPunctMarker add_dummy_punct(Sentence& s) {
  if (s.tokens.empty() || ends_in_punctuation(s)) return {false};
  Token dummy;
  dummy.id = s.size() + 1;
  dummy.form = ".";
  dummy.upos = "PUNCT";
  s.tokens.push_back(std::move(dummy));
  return {true};
}

void strip_dummy_punct(Sentence& s, const DummyPunctMarker& marker) {
  if (!marker.appended) return;
  if (s.tokens.empty() || s.tokens.back().form != "." || s.tokens.back().upos != "PUNCT")
    fail(ErrorCode::Data, "InconsistentMarker: sentence does not end with the dummy token");
  const int dummy_id = s.size();
  const int dummy_head = s.tokens.back().head;  // may be unset
  s.tokens.pop_back();

  for (Token& tok : s.tokens) {
    if (tok.head != dummy_id) continue;
    int target = dummy_head == kHeadUnset ? kHeadUnset : dummy_head;
    if (target == tok.id) target = 0;  // cannot attach to itself
    tok.head = target;
  }

  // Reattaching dependents of a root-attached dummy can leave several root
  // children; keep the first and hang the rest off it.
  int first_root = 0;
  for (Token& tok : s.tokens) {
    if (tok.head != 0) continue;
    if (first_root == 0)
      first_root = tok.id;
    else
      tok.head = first_root;
  }
}

}  // namespace arbor
