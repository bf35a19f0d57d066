#ifndef ARBOR_ENSEMBLE_HPP
#define ARBOR_ENSEMBLE_HPP

#include <span>

#include "model.hpp"

namespace arbor {

// Element-wise arithmetic mean of every probability vector, in model-list
// order; arc_scores of the result is log(mean head probability + 1e-12).
ScoredSentence average_scored(std::span<const ScoredSentence> outputs);

// Forward each model, average in probability space, decode once. The label
// heads condition on the argmax of the averaged head distribution.
Sentence ensemble_predict(std::span<const ParserModel* const> models,
                          const Sentence& sentence);

}  // namespace arbor

#endif
