#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "conllu.hpp"
#include "model_io.hpp"
#include "test_support.hpp"

using namespace arbor;

namespace {

std::string fixture(const std::string& name) {
  return read_file(std::string(ARBOR_TEST_DATA) + "/" + name);
}

std::string token_line(const std::string& id, const std::string& form,
                       const std::string& head, const std::string& deprel) {
  return id + "\t" + form + "\t_\t_\t_\t_\t" + head + "\t" + deprel + "\t_\t_\n";
}

}  // namespace

TEST_CASE("minimal two-token sentence parses") {
  std::string text = token_line("1", "arma", "2", "obj") + token_line("2", "cano", "0", "root");
  Treebank tb = parse_conllu(text, "t");
  CHECK(tb.sentence_count() == 1);
  CHECK(tb.token_count() == 2);
  CHECK(tb.sentences[0].tokens[0].form == "arma");
  CHECK(tb.sentences[0].tokens[0].head == 2);
  CHECK(tb.sentences[0].tokens[1].head == 0);
}

TEST_CASE("non-contiguous ids are rejected with the line number") {
  std::string text = token_line("1", "arma", "0", "root") + token_line("3", "cano", "1", "obj");
  try {
    parse_conllu(text, "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::NonContiguousIds);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("multiword range line becomes a passthrough entry") {
  std::string text = fixture("mwt.conllu");
  Treebank tb = parse_conllu(text, "t");
  REQUIRE(tb.sentence_count() == 1);
  CHECK(tb.sentences[0].tokens.size() == 2);
  REQUIRE(tb.sentences[0].mwt_ranges.size() == 1);
  CHECK(tb.sentences[0].mwt_ranges[0] == MwtRange{1, 2, "della"});
  CHECK(serialize_conllu(tb) == text);
}

TEST_CASE("canonical fixture round-trips byte for byte") {
  std::string text = fixture("canonical.conllu");
  CHECK(serialize_conllu(parse_conllu(text, "t")) == text);
}

TEST_CASE("empty feats serialize as underscore and comments come first") {
  Sentence s;
  s.comments.push_back("# sent_id = 1");
  Token tok;
  tok.id = 1;
  tok.form = "cano";
  tok.head = 0;
  tok.deprel = "root";
  s.tokens.push_back(tok);
  std::string out;
  append_sentence(out, s);
  CHECK(out == "# sent_id = 1\n1\tcano\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
}

TEST_CASE("empty nodes are rejected") {
  std::string text = token_line("1", "arma", "0", "root") + token_line("1.1", "x", "_", "_");
  CHECK_THROWS_AS(parse_conllu(text, "t"), ParseError);
  try {
    parse_conllu(text, "t");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::EmptyNodeUnsupported);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("wrong column count is malformed") {
  CHECK_THROWS_AS(parse_conllu("1\tarma\t_\n", "t"), ParseError);
  std::string eleven = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\textra\n";
  try {
    parse_conllu(eleven, "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::MalformedLine);
    CHECK(e.line() == 1);
  }
}

TEST_CASE("heads outside 0..n and self-heads are rejected") {
  try {
    parse_conllu(token_line("1", "arma", "2", "obj"), "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::HeadOutOfRange);
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(parse_conllu(token_line("1", "arma", "1", "obj"), "t"), ParseError);
}

TEST_CASE("unknown UPOS tags are rejected") {
  std::string text = "1\tarma\t_\tNOUNS\t_\t_\t0\troot\t_\t_\n";
  CHECK_THROWS_AS(parse_conllu(text, "t"), ParseError);
}

TEST_CASE("non-canonical feats parse and round-trip to canonical order") {
  std::string text = "1\tarma\t_\tNOUN\t_\tNumber=Plur|Case=Acc\t0\troot\t_\t_\n";
  Treebank tb = parse_conllu(text, "t");
  CHECK(serialize_feats(tb.sentences[0].tokens[0].feats) == "Case=Acc|Number=Plur");
  CHECK(serialize_conllu(tb) ==
        "1\tarma\t_\tNOUN\t_\tCase=Acc|Number=Plur\t0\troot\t_\t_\n\n");
  CHECK_THROWS_AS(parse_conllu("1\tarma\t_\tNOUN\t_\tCase\t0\troot\t_\t_\n", "t"),
                  ParseError);
}

TEST_CASE("feats sort case-insensitively") {
  std::vector<Feat> feats = {{"abbr", "Yes"}, {"Case", "Nom"}};
  sort_feats(feats);
  CHECK(serialize_feats(feats) == "abbr=Yes|Case=Nom");
}

TEST_CASE("sentences without tokens are rejected") {
  CHECK_THROWS_AS(parse_conllu("# only a comment\n\n", "t"), ParseError);
}

TEST_CASE("validate_tree on the contract examples") {
  CHECK(validate_heads(std::vector<int>{0, 1, 1}).ok());

  TreeCheck cycle = validate_heads(std::vector<int>{2, 1});
  CHECK(cycle.kind == TreeCheck::Kind::Cycle);
  CHECK(cycle.cycle == std::vector<int>{1, 2});

  CHECK(validate_heads(std::vector<int>{0, 0, 1}).kind == TreeCheck::Kind::MultipleRoots);
}

TEST_CASE("validate_tree agrees with a DFS reachability oracle") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 8));
    std::vector<int> heads = arbor_test::random_heads(rng, n);

    // Oracle: exactly one root child, and depth-first search from it over
    // the child lists visits all n tokens exactly once.
    int root = 0, roots = 0;
    for (int d = 1; d <= n; ++d)
      if (heads[d - 1] == 0) {
        root = d;
        ++roots;
      }
    bool oracle_ok = roots == 1;
    if (oracle_ok) {
      std::vector<std::vector<int>> children(n + 1);
      for (int d = 1; d <= n; ++d) children[heads[d - 1]].push_back(d);
      std::vector<int> stack = {root};
      std::vector<bool> seen(n + 1, false);
      int visited = 0;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (seen[v]) {
          oracle_ok = false;
          break;
        }
        seen[v] = true;
        ++visited;
        for (int c : children[v]) stack.push_back(c);
      }
      oracle_ok = oracle_ok && visited == n;
    }
    CHECK(validate_heads(heads).ok() == oracle_ok);
  }
}

TEST_CASE("parse of serialize is the identity on random treebanks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Treebank tb = arbor_test::random_treebank(rng, 3);
    Treebank back = parse_conllu(serialize_conllu(tb), tb.name);
    REQUIRE(back.sentence_count() == tb.sentence_count());
    CHECK(back.token_count() == tb.token_count());
    for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
      CAPTURE(trial);
      CAPTURE(i);
      CHECK(back.sentences[i] == tb.sentences[i]);
    }
  }
}

TEST_CASE("token_count sums over sentences") {
  Treebank tb = arbor_test::make_toy_treebank(10, 1);
  std::size_t total = 0;
  for (const Sentence& s : tb.sentences) total += s.tokens.size();
  CHECK(tb.token_count() == total);
  CHECK(tb.sentence_count() == 10);
}
