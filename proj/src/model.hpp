#ifndef ARBOR_MODEL_HPP
#define ARBOR_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "conllu.hpp"
#include "decoder.hpp"
#include "errors.hpp"
#include "vocab.hpp"

namespace arbor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ChannelSource { Form, Upos };

struct ChannelConfig {
  ChannelSource source = ChannelSource::Form;
  int dim = 256;
  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

struct ModelConfig {
  std::vector<ChannelConfig> channels = {{ChannelSource::Form, 256}};
  int lstm_layers = 2;
  int lstm_dim = 256;          // per direction
  int head_hidden_dim = 2048;  // ReLU layer before every classifier and q/k
  int qk_dim = 512;
  bool case_fold = false;
  std::uint64_t seed = 1;

  bool use_gold_upos() const;
  int encoder_input_dim() const;
  int encoder_output_dim() const { return 2 * lstm_dim; }
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Vocabularies {
  std::vector<Vocab> channel;  // parallel to ModelConfig::channels
  Vocab labels;
  Vocab upos;
  Vocab feats;
  friend bool operator==(const Vocabularies&, const Vocabularies&) = default;
};

Vocabularies build_vocabularies(const ModelConfig& config, std::span<const Treebank> tbs);

struct Param {
  std::string name;
  Matrix value;
};

struct ParserModel {
  ModelConfig config;
  Vocabularies vocabs;
  std::vector<Param> params;
  std::unordered_map<std::string, int> param_index;

  Matrix& param(std::string_view name);
  const Matrix& param(std::string_view name) const;
  void rebuild_index();
};

struct ParamShape {
  std::string name;
  int rows = 0;
  int cols = 0;
};

// Parameter names and shapes as a deterministic function of the config and
// vocabulary sizes; init_model and the container loader share it.
std::vector<ParamShape> param_layout(const ModelConfig& config, const Vocabularies& vocabs);

// Deterministic seeded initialization: matrices uniform in [-r, r] with
// r = sqrt(6 / (rows + cols)), biases zero.
ParserModel init_model(const ModelConfig& config, Vocabularies vocabs);

struct ScoredSentence {
  int n = 0;
  ArcScores arc_scores;             // raw query-key dot products
  std::vector<Vector> head_probs;   // per dependent, length n + 1, self mass 0
  std::vector<int> argmax_heads;    // highest-scoring head per dependent
  std::vector<Vector> label_probs;  // per token, over the label vocabulary
  std::vector<Vector> upos_probs;
  std::vector<Vector> feats_probs;
};

// label_heads, when given, overrides the score-argmax conditioning of the
// label head (used by the ensemble).
ScoredSentence forward(const ParserModel& model, const Sentence& sentence,
                       const std::vector<int>* label_heads = nullptr);

double loss(const ParserModel& model, const Sentence& sentence);

using GradientList = std::vector<Matrix>;  // parallel to ParserModel::params

// Exact reverse-mode gradient of the mean batch loss.
GradientList gradients(const ParserModel& model, std::span<const Sentence* const> batch,
                       double* mean_loss = nullptr);

// Chu-Liu/Edmonds over log(head_probs + 1e-12).
std::vector<int> decode_heads(const ScoredSentence& scored);

// Writes heads, deprels, UPOS, and feats into a copy of the input sentence.
// Gold UPOS is echoed when the model consumes it as an input channel.
Sentence annotate(const ModelConfig& config, const Vocabularies& vocabs,
                  const ScoredSentence& scored, Sentence sentence);

Sentence predict(const ParserModel& model, const Sentence& sentence);

}  // namespace arbor

#endif
