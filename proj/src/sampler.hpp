#ifndef ARBOR_SAMPLER_HPP
#define ARBOR_SAMPLER_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace arbor {

// weight_i = sqrt(count_i) / sum_j sqrt(count_j)
std::vector<double> treebank_weights(std::span<const std::size_t> counts);

// Draws (treebank, sentence) pairs: a treebank by weight, then a sentence
// uniformly within it, with replacement. The seed fully determines the
// stream.
class BatchSampler {
 public:
  BatchSampler(std::uint64_t seed, std::vector<std::size_t> sentence_counts);

  std::pair<int, int> next();
  std::vector<std::pair<int, int>> next_batch(int batch_size);

  const std::vector<double>& weights() const { return weights_; }

 private:
  std::mt19937_64 rng_;
  std::vector<std::size_t> counts_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// One line per treebank: name, sentence count, weight to six decimals.
std::string sample_report(std::span<const std::string> names,
                          std::span<const std::size_t> counts);

}  // namespace arbor

#endif
