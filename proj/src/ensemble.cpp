#include "ensemble.hpp"

#include <cmath>

namespace arbor {

namespace {

int argmax_nonself(const Vector& v, int self) {
  int best = -1;
  for (int i = 0; i < v.size(); ++i) {
    if (i == self) continue;
    if (best == -1 || v[i] > v[best]) best = i;
  }
  return best;
}

std::vector<Vector> mean_vectors(std::span<const ScoredSentence> outputs,
                                 const std::vector<Vector> ScoredSentence::* member,
                                 const char* what) {
  const std::size_t k = outputs.size();
  const auto& first = outputs[0].*member;
  std::vector<Vector> mean(first.size());
  for (std::size_t t = 0; t < first.size(); ++t) {
    Vector acc = first[t];
    for (std::size_t m = 1; m < k; ++m) {
      const auto& vecs = outputs[m].*member;
      if (vecs.size() != first.size() || vecs[t].size() != first[t].size())
        fail(ErrorCode::Data, std::string("VocabularyMismatch: ") + what +
                                  " distributions have different dimensions");
      acc += vecs[t];
    }
    mean[t] = acc / static_cast<double>(k);
  }
  return mean;
}

}  // namespace

ScoredSentence average_scored(std::span<const ScoredSentence> outputs) {
  if (outputs.empty()) fail(ErrorCode::InvalidArg, "cannot average zero model outputs");
  const int n = outputs[0].n;
  for (const ScoredSentence& s : outputs)
    if (s.n != n) fail(ErrorCode::Data, "ShapeMismatch: outputs are for different sentence lengths");

  ScoredSentence mean;
  mean.n = n;
  mean.head_probs = mean_vectors(outputs, &ScoredSentence::head_probs, "head");
  mean.label_probs = mean_vectors(outputs, &ScoredSentence::label_probs, "label");
  mean.upos_probs = mean_vectors(outputs, &ScoredSentence::upos_probs, "UPOS");
  mean.feats_probs = mean_vectors(outputs, &ScoredSentence::feats_probs, "feats");

  mean.arc_scores = ArcScores::make(n);
  mean.argmax_heads.resize(n);
  for (int d = 1; d <= n; ++d) {
    for (int h = 0; h <= n; ++h)
      if (h != d) mean.arc_scores.set(h, d, std::log(mean.head_probs[d - 1][h] + 1e-12));
    mean.argmax_heads[d - 1] = argmax_nonself(mean.head_probs[d - 1], d);
  }
  return mean;
}

Sentence ensemble_predict(std::span<const ParserModel* const> models,
                          const Sentence& sentence) {
  if (models.empty()) fail(ErrorCode::InvalidArg, "cannot predict with zero models");
  const ParserModel& first = *models[0];
  for (const ParserModel* m : models) {
    if (!(m->vocabs == first.vocabs))
      fail(ErrorCode::Data, "VocabularyMismatch: ensemble members were trained on different data");
    if (m->config.use_gold_upos() != first.config.use_gold_upos())
      fail(ErrorCode::Data, "ensemble members disagree on gold UPOS input");
  }

  const int n = sentence.size();
  std::vector<ScoredSentence> scored;
  scored.reserve(models.size());
  for (const ParserModel* m : models) scored.push_back(forward(*m, sentence));

  // Condition every label head on the argmax of the averaged head
  // distribution, then average the resulting distributions.
  std::vector<Vector> mean_heads =
      mean_vectors(scored, &ScoredSentence::head_probs, "head");
  std::vector<int> cond_heads(n);
  for (int d = 1; d <= n; ++d) cond_heads[d - 1] = argmax_nonself(mean_heads[d - 1], d);

  std::vector<ScoredSentence> conditioned;
  conditioned.reserve(models.size());
  for (const ParserModel* m : models)
    conditioned.push_back(forward(*m, sentence, &cond_heads));

  ScoredSentence mean = average_scored(conditioned);
  return annotate(first.config, first.vocabs, mean, sentence);
}

}  // namespace arbor
