#ifndef ARBOR_TEST_SUPPORT_HPP
#define ARBOR_TEST_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "conllu.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "trainer.hpp"

namespace arbor_test {

// ---------------------------------------------------------------------------
// Synthetic training corpus: template sentences over a small Latin lexicon
// with deterministic heads, deprels, UPOS, and feature bundles.

struct ToyWord {
  const char* form;
  const char* upos;
};

inline arbor::Token make_token(int id, const ToyWord& word, int head, const char* deprel,
                               const char* feats) {
  arbor::Token tok;
  tok.id = id;
  tok.form = word.form;
  tok.lemma = word.form;
  tok.upos = word.upos;
  tok.head = head;
  tok.deprel = deprel;
  tok.feats = arbor::parse_feats(feats);
  return tok;
}

inline arbor::Treebank make_toy_treebank(int n_sentences, std::uint64_t seed,
                                         std::string name = "toy") {
  static const std::vector<ToyWord> nouns = {
      {"puella", "NOUN"}, {"agricola", "NOUN"}, {"poeta", "NOUN"}, {"nauta", "NOUN"},
      {"regina", "NOUN"}, {"femina", "NOUN"},   {"aqua", "NOUN"},  {"terra", "NOUN"},
      {"silva", "NOUN"},  {"via", "NOUN"},      {"insula", "NOUN"}, {"corona", "NOUN"}};
  static const std::vector<ToyWord> verbs = {
      {"amat", "VERB"},  {"videt", "VERB"}, {"laudat", "VERB"}, {"vocat", "VERB"},
      {"portat", "VERB"}, {"dat", "VERB"},   {"tenet", "VERB"},  {"monet", "VERB"}};
  static const std::vector<ToyWord> adjectives = {{"magna", "ADJ"}, {"parva", "ADJ"},
                                                  {"bona", "ADJ"},  {"nova", "ADJ"}};
  static const std::vector<ToyWord> adverbs = {{"saepe", "ADV"}, {"semper", "ADV"},
                                               {"bene", "ADV"}};
  static const std::vector<ToyWord> determiners = {{"haec", "DET"}, {"illa", "DET"}};
  static const std::vector<ToyWord> adpositions = {{"in", "ADP"}, {"ad", "ADP"}, {"de", "ADP"}};
  static const std::vector<ToyWord> subordinators = {{"dum", "SCONJ"}, {"quod", "SCONJ"}};

  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<ToyWord>& pool) -> const ToyWord& {
    return pool[arbor::uniform_index(rng, pool.size())];
  };

  arbor::Treebank tb;
  tb.name = std::move(name);
  std::set<std::vector<std::string>> seen;
  while (static_cast<int>(tb.sentences.size()) < n_sentences) {
    arbor::Sentence s;
    switch (arbor::uniform_index(rng, 5)) {
      case 0:  // subject verb object .
        s.tokens = {make_token(1, pick(nouns), 2, "nsubj", "Case=Nom|Number=Sing"),
                    make_token(2, pick(verbs), 0, "root", "Number=Sing|Person=3"),
                    make_token(3, pick(nouns), 2, "obj", "Case=Acc|Number=Sing"),
                    make_token(4, {".", "PUNCT"}, 2, "punct", "_")};
        break;
      case 1:  // determiner subject verb object
        s.tokens = {make_token(1, pick(determiners), 2, "det", "PronType=Dem"),
                    make_token(2, pick(nouns), 3, "nsubj", "Case=Nom|Number=Sing"),
                    make_token(3, pick(verbs), 0, "root", "Number=Sing|Person=3"),
                    make_token(4, pick(nouns), 3, "obj", "Case=Acc|Number=Sing")};
        break;
      case 2:  // subject verb adverb
        s.tokens = {make_token(1, pick(nouns), 2, "nsubj", "Case=Nom|Number=Sing"),
                    make_token(2, pick(verbs), 0, "root", "Number=Sing|Person=3"),
                    make_token(3, pick(adverbs), 2, "advmod", "_")};
        break;
      case 3:  // adjective subject verb object adposition oblique
        s.tokens = {make_token(1, pick(adjectives), 2, "amod", "Degree=Pos"),
                    make_token(2, pick(nouns), 3, "nsubj", "Case=Nom|Number=Sing"),
                    make_token(3, pick(verbs), 0, "root", "Number=Sing|Person=3"),
                    make_token(4, pick(nouns), 3, "obj", "Case=Acc|Number=Sing"),
                    make_token(5, pick(adpositions), 6, "case", "_"),
                    make_token(6, pick(nouns), 3, "obl", "Case=Abl|Number=Sing")};
        break;
      default:  // subject verb subordinator subject verb
        s.tokens = {make_token(1, pick(nouns), 2, "nsubj", "Case=Nom|Number=Sing"),
                    make_token(2, pick(verbs), 0, "root", "Number=Sing|Person=3"),
                    make_token(3, pick(subordinators), 5, "mark", "_"),
                    make_token(4, pick(nouns), 5, "nsubj", "Case=Nom|Number=Sing"),
                    make_token(5, pick(verbs), 2, "advcl", "Number=Sing|Person=3")};
        break;
    }
    std::vector<std::string> forms;
    for (const arbor::Token& tok : s.tokens) forms.push_back(tok.form);
    if (!seen.insert(forms).second) continue;
    s.comments.push_back("# sent_id = " + std::to_string(tb.sentences.size() + 1));
    tb.sentences.push_back(std::move(s));
  }
  return tb;
}

// A corpus small enough for finite-difference checks: vocabulary under 20
// forms including the unknown item.
inline arbor::Treebank make_micro_treebank(std::string name = "micro") {
  arbor::Treebank tb;
  tb.name = std::move(name);
  arbor::Sentence a;
  a.tokens = {make_token(1, {"puella", "NOUN"}, 2, "nsubj", "Case=Nom"),
              make_token(2, {"amat", "VERB"}, 0, "root", "Person=3"),
              make_token(3, {"aquam", "NOUN"}, 2, "obj", "Case=Acc")};
  arbor::Sentence b;
  b.tokens = {make_token(1, {"nauta", "NOUN"}, 3, "nsubj", "Case=Nom"),
              make_token(2, {"bene", "ADV"}, 3, "advmod", "_"),
              make_token(3, {"videt", "VERB"}, 0, "root", "Person=3"),
              make_token(4, {"terram", "NOUN"}, 3, "obj", "Case=Acc")};
  arbor::Sentence c;
  c.tokens = {make_token(1, {"poeta", "NOUN"}, 2, "nsubj", "Case=Nom"),
              make_token(2, {"cantat", "VERB"}, 0, "root", "Person=3")};
  tb.sentences = {a, b, c};
  return tb;
}

inline arbor::ModelConfig micro_config(std::uint64_t seed) {
  arbor::ModelConfig config;
  config.channels = {{arbor::ChannelSource::Form, 4}};
  config.lstm_layers = 2;
  config.lstm_dim = 4;
  config.head_hidden_dim = 8;
  config.qk_dim = 4;
  config.seed = seed;
  return config;
}

inline arbor::ModelConfig desk_config(std::uint64_t seed) {
  arbor::ModelConfig config;
  config.channels = {{arbor::ChannelSource::Form, 32}};
  config.lstm_layers = 2;
  config.lstm_dim = 64;
  config.head_hidden_dim = 128;
  config.qk_dim = 32;
  config.seed = seed;
  return config;
}

// ---------------------------------------------------------------------------
// Random treebanks for round-trip properties (valid token invariants, not
// necessarily valid trees).

inline arbor::Treebank random_treebank(std::mt19937_64& rng, int n_sentences) {
  static const std::vector<std::string> forms = {"aqua",  "terra", "ad",   "magna",
                                                 "videt", "et",    "saxa", "alta"};
  static const std::vector<std::string> upos = {"NOUN", "VERB", "ADJ", "ADP",
                                                "CCONJ", "X",   "_"};
  static const std::vector<std::string> deprels = {"nsubj", "obj",       "root",
                                                   "nmod",  "acl:relcl", "dep"};
  static const std::vector<std::string> featkeys = {"Case", "Number", "Gender"};
  static const std::vector<std::string> featvals = {"Nom", "Acc", "Sing", "Plur"};

  arbor::Treebank tb;
  tb.name = "random";
  for (int i = 0; i < n_sentences; ++i) {
    arbor::Sentence s;
    if (arbor::uniform_index(rng, 3) == 0)
      s.comments.push_back("# sent_id = r" + std::to_string(i));
    const int n = 1 + static_cast<int>(arbor::uniform_index(rng, 6));
    for (int id = 1; id <= n; ++id) {
      arbor::Token tok;
      tok.id = id;
      tok.form = forms[arbor::uniform_index(rng, forms.size())];
      tok.lemma = forms[arbor::uniform_index(rng, forms.size())];
      tok.upos = upos[arbor::uniform_index(rng, upos.size())];
      tok.xpos = arbor::uniform_index(rng, 2) ? "_" : "n-s";
      int n_feats = static_cast<int>(arbor::uniform_index(rng, 3));
      for (int f = 0; f < n_feats; ++f)
        tok.feats.push_back({featkeys[arbor::uniform_index(rng, featkeys.size())],
                             featvals[arbor::uniform_index(rng, featvals.size())]});
      arbor::sort_feats(tok.feats);
      if (arbor::uniform_index(rng, 8) != 0) {
        do {
          tok.head = static_cast<int>(arbor::uniform_index(rng, n + 1));
        } while (tok.head == id);
        tok.deprel = deprels[arbor::uniform_index(rng, deprels.size())];
      }
      tok.misc = arbor::uniform_index(rng, 4) ? "_" : "SpaceAfter=No";
      s.tokens.push_back(std::move(tok));
    }
    if (n >= 2 && arbor::uniform_index(rng, 4) == 0)
      s.mwt_ranges.push_back({1, 2, "delle"});
    tb.sentences.push_back(std::move(s));
  }
  return tb;
}

// Random heads with exactly one token per slot in 0..n excluding self.
inline std::vector<int> random_heads(std::mt19937_64& rng, int n) {
  std::vector<int> heads(n);
  for (int d = 1; d <= n; ++d) {
    do {
      heads[d - 1] = static_cast<int>(arbor::uniform_index(rng, n + 1));
    } while (heads[d - 1] == d);
  }
  return heads;
}

}  // namespace arbor_test

#endif
