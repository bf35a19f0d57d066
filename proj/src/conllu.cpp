#include "conllu.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace arbor {

namespace {

constexpr std::array<std::string_view, 17> kUposTags = {
    "ADJ",  "ADP",  "ADV",  "AUX",   "CCONJ", "DET",   "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",   "VERB", "X"};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool parse_int(std::string_view s, int& out) {
  if (!all_digits(s)) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw ParseError(ParseError::Kind::MalformedLine, line,
                   "line " + std::to_string(line) + ": " + what);
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, const std::string& msg)
    : Error(ErrorCode::Malformed, msg), kind_(kind), line_(line) {}

std::size_t Treebank::token_count() const {
  std::size_t total = 0;
  for (const Sentence& s : sentences) total += s.tokens.size();
  return total;
}

bool is_universal_upos(std::string_view tag) {
  return std::find(kUposTags.begin(), kUposTags.end(), tag) != kUposTags.end();
}

std::string_view universal_deprel(std::string_view deprel) {
  auto pos = deprel.find(':');
  return pos == std::string_view::npos ? deprel : deprel.substr(0, pos);
}

void sort_feats(std::vector<Feat>& feats) {
  std::stable_sort(feats.begin(), feats.end(), [](const Feat& a, const Feat& b) {
    std::string la = lower_ascii(a.key), lb = lower_ascii(b.key);
    if (la != lb) return la < lb;
    if (a.key != b.key) return a.key < b.key;
    return a.value < b.value;
  });
}

std::string serialize_feats(const std::vector<Feat>& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (i) out += '|';
    out += feats[i].key;
    out += '=';
    out += feats[i].value;
  }
  return out;
}

std::vector<Feat> parse_feats(std::string_view column) {
  std::vector<Feat> feats;
  if (column == "_" || column.empty()) return feats;
  std::size_t start = 0;
  while (start <= column.size()) {
    std::size_t bar = column.find('|', start);
    std::string_view item = column.substr(
        start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= item.size())
      throw std::invalid_argument("feature is not Key=Value: '" + std::string(item) + "'");
    feats.push_back({std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))});
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  sort_feats(feats);
  return feats;
}

namespace {

struct PendingMwt {
  MwtRange range;
  std::size_t line = 0;
};

struct Block {
  Sentence sentence;
  std::vector<PendingMwt> mwts;
  std::vector<std::size_t> token_lines;
  std::size_t first_line = 0;
  bool empty() const {
    return sentence.comments.empty() && sentence.tokens.empty() && mwts.empty();
  }
};

void flush_block(Block& block, Treebank& tb) {
  if (block.empty()) return;
  Sentence& s = block.sentence;
  if (s.tokens.empty())
    malformed(block.first_line, "sentence block has no token lines");

  const int n = s.size();
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Token& tok = s.tokens[i];
    if (tok.head != kHeadUnset && (tok.head < 0 || tok.head > n || tok.head == tok.id))
      throw ParseError(ParseError::Kind::HeadOutOfRange, block.token_lines[i],
                       "line " + std::to_string(block.token_lines[i]) + ": head " +
                           std::to_string(tok.head) + " outside 0.." + std::to_string(n) +
                           " (or self-reference) for token " + std::to_string(tok.id));
  }
  for (const PendingMwt& m : block.mwts) {
    if (m.range.start < 1 || m.range.end > n || m.range.start > m.range.end)
      malformed(m.line, "multiword range " + std::to_string(m.range.start) + "-" +
                            std::to_string(m.range.end) + " outside token range 1.." +
                            std::to_string(n));
    s.mwt_ranges.push_back(m.range);
  }
  tb.sentences.push_back(std::move(s));
  block = Block{};
}

}  // namespace

Treebank parse_conllu(std::string_view text, std::string name) {
  Treebank tb;
  tb.name = std::move(name);
  Block block;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    if (pos == text.size() && line_no > 0) break;
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush_block(block, tb);
      continue;
    }
    if (block.empty()) block.first_line = line_no;

    if (line.front() == '#') {
      block.sentence.comments.emplace_back(line);
      continue;
    }

    // Token, multiword-range, or empty-node line: ten tab-separated columns.
    std::vector<std::string_view> cols;
    std::size_t field_start = 0;
    while (true) {
      std::size_t tab = line.find('\t', field_start);
      cols.push_back(line.substr(
          field_start, tab == std::string_view::npos ? std::string_view::npos
                                                     : tab - field_start));
      if (tab == std::string_view::npos) break;
      field_start = tab + 1;
    }
    if (cols.size() != 10)
      malformed(line_no, "expected 10 tab-separated columns, found " +
                             std::to_string(cols.size()));

    std::string_view id_col = cols[0];
    if (id_col.find('.') != std::string_view::npos)
      throw ParseError(ParseError::Kind::EmptyNodeUnsupported, line_no,
                       "line " + std::to_string(line_no) + ": empty node '" +
                           std::string(id_col) + "' is not supported");

    if (auto dash = id_col.find('-'); dash != std::string_view::npos) {
      PendingMwt mwt;
      mwt.line = line_no;
      if (!parse_int(id_col.substr(0, dash), mwt.range.start) ||
          !parse_int(id_col.substr(dash + 1), mwt.range.end))
        malformed(line_no, "invalid multiword id '" + std::string(id_col) + "'");
      mwt.range.form = std::string(cols[1]);
      block.mwts.push_back(std::move(mwt));
      continue;
    }

    Token tok;
    if (!parse_int(id_col, tok.id))
      malformed(line_no, "invalid token id '" + std::string(id_col) + "'");
    int expected = block.sentence.size() + 1;
    if (tok.id != expected)
      throw ParseError(ParseError::Kind::NonContiguousIds, line_no,
                       "line " + std::to_string(line_no) + ": token id " +
                           std::to_string(tok.id) + ", expected " + std::to_string(expected));

    tok.form = std::string(cols[1]);
    tok.lemma = std::string(cols[2]);
    tok.upos = std::string(cols[3]);
    if (tok.upos != "_" && !is_universal_upos(tok.upos))
      malformed(line_no, "'" + tok.upos + "' is not a universal POS tag");
    tok.xpos = std::string(cols[4]);
    try {
      tok.feats = parse_feats(cols[5]);
    } catch (const std::invalid_argument& e) {
      malformed(line_no, e.what());
    }
    if (cols[6] == "_") {
      tok.head = kHeadUnset;
    } else if (!parse_int(cols[6], tok.head)) {
      malformed(line_no, "invalid head '" + std::string(cols[6]) + "'");
    }
    tok.deprel = std::string(cols[7]);
    tok.deps = std::string(cols[8]);
    tok.misc = std::string(cols[9]);

    block.sentence.tokens.push_back(std::move(tok));
    block.token_lines.push_back(line_no);
  }
  flush_block(block, tb);
  return tb;
}

void append_sentence(std::string& out, const Sentence& s) {
  for (const std::string& c : s.comments) {
    out += c;
    out += '\n';
  }
  std::vector<MwtRange> mwts = s.mwt_ranges;
  std::sort(mwts.begin(), mwts.end(),
            [](const MwtRange& a, const MwtRange& b) { return a.start < b.start; });
  std::size_t next_mwt = 0;
  for (const Token& tok : s.tokens) {
    while (next_mwt < mwts.size() && mwts[next_mwt].start == tok.id) {
      const MwtRange& m = mwts[next_mwt++];
      out += std::to_string(m.start);
      out += '-';
      out += std::to_string(m.end);
      out += '\t';
      out += m.form;
      out += "\t_\t_\t_\t_\t_\t_\t_\t_\n";
    }
    out += std::to_string(tok.id);
    out += '\t';
    out += tok.form;
    out += '\t';
    out += tok.lemma;
    out += '\t';
    out += tok.upos;
    out += '\t';
    out += tok.xpos;
    out += '\t';
    out += serialize_feats(tok.feats);
    out += '\t';
    out += tok.head == kHeadUnset ? "_" : std::to_string(tok.head);
    out += '\t';
    out += tok.deprel;
    out += '\t';
    out += tok.deps;
    out += '\t';
    out += tok.misc;
    out += '\n';
  }
  out += '\n';
}

std::string serialize_conllu(const Treebank& tb) {
  std::string out;
  for (const Sentence& s : tb.sentences) append_sentence(out, s);
  return out;
}

TreeCheck validate_heads(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  for (int i = 0; i < n; ++i) {
    if (heads[i] < 0 || heads[i] > n)
      fail(ErrorCode::InvalidArg,
           "head of token " + std::to_string(i + 1) + " is unset or out of range");
  }

  // Cycle detection over the head function; reported before root-count
  // problems so that a rootless cycle is diagnosed as the cycle it is.
  std::vector<int> state(n + 1, 0);  // 0 unvisited, 1 on current path, 2 done
  for (int start = 1; start <= n; ++start) {
    if (state[start] != 0) continue;
    std::vector<int> path;
    int j = start;
    while (j != 0) {
      if (state[j] == 1) {
        std::vector<int> cycle;
        int k = j;
        do {
          cycle.push_back(k);
          k = heads[k - 1];
        } while (k != j);
        std::sort(cycle.begin(), cycle.end());
        return {TreeCheck::Kind::Cycle, std::move(cycle)};
      }
      if (state[j] == 2) break;
      state[j] = 1;
      path.push_back(j);
      j = heads[j - 1];
    }
    for (int p : path) state[p] = 2;
  }

  int roots = static_cast<int>(std::count(heads.begin(), heads.end(), 0));
  if (roots == 0) return {TreeCheck::Kind::NoRoot, {}};
  if (roots > 1) return {TreeCheck::Kind::MultipleRoots, {}};
  return {TreeCheck::Kind::Ok, {}};
}

TreeCheck validate_tree(const Sentence& s) {
  std::vector<int> heads;
  heads.reserve(s.tokens.size());
  for (const Token& tok : s.tokens) heads.push_back(tok.head);
  return validate_heads(heads);
}

}  // namespace arbor
