#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rng.hpp"

namespace arbor {

std::vector<double> treebank_weights(std::span<const std::size_t> counts) {
  if (counts.empty()) fail(ErrorCode::Data, "EmptyInput: no treebanks to weight");
  std::vector<double> weights(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0)
      fail(ErrorCode::Data, "ZeroCount: treebank " + std::to_string(i) + " has no sentences");
    weights[i] = std::sqrt(static_cast<double>(counts[i]));
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

BatchSampler::BatchSampler(std::uint64_t seed, std::vector<std::size_t> sentence_counts)
    : rng_(seed), counts_(std::move(sentence_counts)) {
  weights_ = treebank_weights(counts_);
  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
}

std::pair<int, int> BatchSampler::next() {
  double u = uniform_unit(rng_);
  std::size_t tb = std::lower_bound(cumulative_.begin(), cumulative_.end(), u,
                                    [](double c, double v) { return c <= v; }) -
                   cumulative_.begin();
  if (tb >= counts_.size()) tb = counts_.size() - 1;
  int sentence = static_cast<int>(uniform_index(rng_, counts_[tb]));
  return {static_cast<int>(tb), sentence};
}

std::vector<std::pair<int, int>> BatchSampler::next_batch(int batch_size) {
  std::vector<std::pair<int, int>> batch;
  batch.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) batch.push_back(next());
  return batch;
}

std::string sample_report(std::span<const std::string> names,
                          std::span<const std::size_t> counts) {
  std::vector<double> weights = treebank_weights(counts);
  std::string out;
  char line[512];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::snprintf(line, sizeof(line), "%s\t%zu\t%.6f\n", names[i].c_str(), counts[i],
                  weights[i]);
    out += line;
  }
  return out;
}

}  // namespace arbor
