#ifndef ARBOR_EVALUATION_HPP
#define ARBOR_EVALUATION_HPP

#include <span>
#include <string>
#include <vector>

#include "conllu.hpp"

namespace arbor {

class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t sentence_index, const std::string& msg)
      : Error(ErrorCode::Data, msg), sentence_index_(sentence_index) {}

  std::size_t sentence_index() const noexcept { return sentence_index_; }

 private:
  std::size_t sentence_index_;
};

struct AttachmentScores {
  double uas = 0.0;
  double las = 0.0;
};

struct TaggingScores {
  double upos_acc = 0.0;
  double ufeats_acc = 0.0;
};

// Percentages over all tokens, punctuation included. When strip_subtypes is
// set, deprels compare by the part before ':'.
AttachmentScores attachment_scores(const Treebank& gold, const Treebank& system,
                                   bool strip_subtypes = true);
TaggingScores tagging_accuracy(const Treebank& gold, const Treebank& system);

// Unweighted mean, rounded half-up to two decimals.
double macro_average(std::span<const double> values);
double round2_half_up(double value);

struct TreebankScores {
  std::string name;
  double uas = 0.0;
  double las = 0.0;
  double upos_acc = 0.0;
  double ufeats_acc = 0.0;
};

struct MetricReport {
  std::vector<TreebankScores> per_treebank;
  double macro_uas = 0.0;
  double macro_las = 0.0;
  double macro_upos = 0.0;
  double macro_ufeats = 0.0;
};

MetricReport evaluate_treebanks(std::span<const Treebank> gold,
                                std::span<const Treebank> system,
                                bool strip_subtypes = true);
std::string metrics_text(const MetricReport& report);
std::string metrics_json(const MetricReport& report);

}  // namespace arbor

#endif
