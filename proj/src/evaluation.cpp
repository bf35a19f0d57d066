#include "evaluation.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace arbor {

namespace {

void check_aligned(const Treebank& gold, const Treebank& system) {
  if (gold.sentence_count() != system.sentence_count()) {
    std::size_t index = std::min(gold.sentence_count(), system.sentence_count());
    throw AlignmentError(index, "AlignmentError: gold has " +
                                    std::to_string(gold.sentence_count()) +
                                    " sentences, system has " +
                                    std::to_string(system.sentence_count()));
  }
  for (std::size_t i = 0; i < gold.sentence_count(); ++i) {
    const Sentence& g = gold.sentences[i];
    const Sentence& s = system.sentences[i];
    if (g.tokens.size() != s.tokens.size())
      throw AlignmentError(i, "AlignmentError at sentence " + std::to_string(i) +
                                  ": token counts differ (" +
                                  std::to_string(g.tokens.size()) + " vs " +
                                  std::to_string(s.tokens.size()) + ")");
    for (std::size_t t = 0; t < g.tokens.size(); ++t) {
      if (g.tokens[t].form != s.tokens[t].form)
        throw AlignmentError(i, "AlignmentError at sentence " + std::to_string(i) +
                                    ": form mismatch at token " + std::to_string(t + 1) +
                                    " ('" + g.tokens[t].form + "' vs '" +
                                    s.tokens[t].form + "')");
    }
  }
}

double percent(std::size_t correct, std::size_t total) {
  return total == 0 ? 100.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

AttachmentScores attachment_scores(const Treebank& gold, const Treebank& system,
                                   bool strip_subtypes) {
  check_aligned(gold, system);
  std::size_t total = 0, head_ok = 0, both_ok = 0;
  for (std::size_t i = 0; i < gold.sentence_count(); ++i) {
    const Sentence& g = gold.sentences[i];
    const Sentence& s = system.sentences[i];
    for (std::size_t t = 0; t < g.tokens.size(); ++t) {
      ++total;
      if (g.tokens[t].head != s.tokens[t].head) continue;
      ++head_ok;
      std::string_view gd = g.tokens[t].deprel;
      std::string_view sd = s.tokens[t].deprel;
      if (strip_subtypes) {
        gd = universal_deprel(gd);
        sd = universal_deprel(sd);
      }
      if (gd == sd) ++both_ok;
    }
  }
  return {percent(head_ok, total), percent(both_ok, total)};
}

TaggingScores tagging_accuracy(const Treebank& gold, const Treebank& system) {
  check_aligned(gold, system);
  std::size_t total = 0, upos_ok = 0, feats_ok = 0;
  for (std::size_t i = 0; i < gold.sentence_count(); ++i) {
    const Sentence& g = gold.sentences[i];
    const Sentence& s = system.sentences[i];
    for (std::size_t t = 0; t < g.tokens.size(); ++t) {
      ++total;
      if (g.tokens[t].upos == s.tokens[t].upos) ++upos_ok;
      // Feats are stored key-sorted, so set comparison is vector equality.
      if (g.tokens[t].feats == s.tokens[t].feats) ++feats_ok;
    }
  }
  return {percent(upos_ok, total), percent(feats_ok, total)};
}

double round2_half_up(double value) {
  return std::floor(value * 100.0 + 0.5) / 100.0;
}

double macro_average(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::Data, "EmptyInput: macro average of no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  return round2_half_up(sum / static_cast<double>(values.size()));
}

MetricReport evaluate_treebanks(std::span<const Treebank> gold,
                                std::span<const Treebank> system,
                                bool strip_subtypes) {
  if (gold.size() != system.size() || gold.empty())
    fail(ErrorCode::InvalidArg, "need the same nonzero number of gold and system treebanks");
  MetricReport report;
  std::vector<double> uas, las, upos, ufeats;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    AttachmentScores att = attachment_scores(gold[i], system[i], strip_subtypes);
    TaggingScores tag = tagging_accuracy(gold[i], system[i]);
    report.per_treebank.push_back(
        {gold[i].name, att.uas, att.las, tag.upos_acc, tag.ufeats_acc});
    uas.push_back(att.uas);
    las.push_back(att.las);
    upos.push_back(tag.upos_acc);
    ufeats.push_back(tag.ufeats_acc);
  }
  report.macro_uas = macro_average(uas);
  report.macro_las = macro_average(las);
  report.macro_upos = macro_average(upos);
  report.macro_ufeats = macro_average(ufeats);
  return report;
}

namespace {

void append_metric_lines(std::string& out, double uas, double las, double upos,
                         double ufeats) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "UAS: %.2f\n", round2_half_up(uas));
  out += buf;
  std::snprintf(buf, sizeof(buf), "LAS: %.2f\n", round2_half_up(las));
  out += buf;
  std::snprintf(buf, sizeof(buf), "UPOS: %.2f\n", round2_half_up(upos));
  out += buf;
  std::snprintf(buf, sizeof(buf), "UFeats: %.2f\n", round2_half_up(ufeats));
  out += buf;
}

}  // namespace

std::string metrics_text(const MetricReport& report) {
  std::string out;
  const bool multi = report.per_treebank.size() > 1;
  for (const TreebankScores& tb : report.per_treebank) {
    if (multi) out += "# " + tb.name + "\n";
    append_metric_lines(out, tb.uas, tb.las, tb.upos_acc, tb.ufeats_acc);
  }
  if (multi) {
    out += "# macro\n";
    append_metric_lines(out, report.macro_uas, report.macro_las, report.macro_upos,
                        report.macro_ufeats);
  }
  return out;
}

std::string metrics_json(const MetricReport& report) {
  nlohmann::json j;
  j["treebanks"] = nlohmann::json::array();
  for (const TreebankScores& tb : report.per_treebank) {
    j["treebanks"].push_back({{"name", tb.name},
                              {"uas", round2_half_up(tb.uas)},
                              {"las", round2_half_up(tb.las)},
                              {"upos", round2_half_up(tb.upos_acc)},
                              {"ufeats", round2_half_up(tb.ufeats_acc)}});
  }
  j["macro"] = {{"uas", report.macro_uas},
                {"las", report.macro_las},
                {"upos", report.macro_upos},
                {"ufeats", report.macro_ufeats}};
  return j.dump(2) + "\n";
}

}  // namespace arbor
