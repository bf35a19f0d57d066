#ifndef ARBOR_HARMONIZER_HPP
#define ARBOR_HARMONIZER_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conllu.hpp"

namespace arbor {

// "DEP_UPOS HEAD_UPOS_OR_* NEW_DEPREL" per line, '#' starts a comment.
struct DepRule {
  std::string dep_upos;
  std::string head_upos;  // "*" matches any head, including the root
  std::string new_deprel;
};

const std::vector<DepRule>& default_dep_rules();
std::vector<DepRule> parse_rule_table(std::string_view text);

// Rewrites `fixed` to `flat` between numeral tokens (NUM dependent attached
// to a NUM head).
Sentence fixed_numerals_to_flat(Sentence s);
Treebank fixed_numerals_to_flat(Treebank tb);

// Replaces the vague `dep` relation by the first matching rule; tokens
// without a match keep `dep`.
Sentence relabel_dep(Sentence s, std::span<const DepRule> rules);
Treebank relabel_dep(Treebank tb, std::span<const DepRule> rules);

struct DummyPunctMarker {
  bool appended = false;
};

// Appends a final "." PUNCT token unless the sentence already ends in
// punctuation. strip_dummy_punct undoes it, reattaching any dependents of
// the dummy token so the result stays a valid tree.
DummyPunctMarker add_dummy_punct(Sentence& s);
void strip_dummy_punct(Sentence& s, const DummyPunctMarker& marker);

}  // namespace arbor

#endif
