#include "trainer.hpp"

#include <cmath>

#include "rng.hpp"
#include "sampler.hpp"

namespace arbor {

void TrainSchedule::validate() const {
  if (frozen_epochs < 0 || main_epochs < 0 || batches_per_epoch < 0)
    fail(ErrorCode::Config, "epoch and batch counts must be >= 0");
  if (warmup_epochs < 0 || warmup_epochs > main_epochs)
    fail(ErrorCode::Config, "warmup_epochs must lie in 0..main_epochs");
  if (batch_size < 1) fail(ErrorCode::Config, "batch_size must be >= 1");
  if (frozen_lr <= 0.0 || peak_lr <= 0.0) fail(ErrorCode::Config, "learning rates must be > 0");
}

double fine_tune_lr(const TrainSchedule& schedule, long batch_index) {
  const long total = static_cast<long>(schedule.main_epochs) * schedule.batches_per_epoch;
  const long warmup = static_cast<long>(schedule.warmup_epochs) * schedule.batches_per_epoch;
  if (total <= 0) return 0.0;
  if (batch_index < warmup)
    return schedule.peak_lr * static_cast<double>(batch_index) / static_cast<double>(warmup);
  if (total - 1 <= warmup) return schedule.peak_lr;
  const double phase =
      static_cast<double>(batch_index - warmup) / static_cast<double>(total - 1 - warmup);
  return schedule.peak_lr * 0.5 * (1.0 + std::cos(M_PI * phase));
}

namespace {

class Adam {
 public:
  explicit Adam(const ParserModel& model) {
    for (const Param& p : model.params) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }

  void step(ParserModel& model, const GradientList& grads, double lr,
            const std::vector<bool>& frozen) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, t_);
    const double bc2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      if (frozen[i]) continue;
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grads[i];
      v_[i] = kBeta2 * v_[i].array() + (1.0 - kBeta2) * grads[i].array().square();
      model.params[i].value.array() -=
          lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

void validate_training_data(std::span<const Treebank> treebanks) {
  if (treebanks.empty()) fail(ErrorCode::Data, "EmptyTreebank: no training treebanks");
  for (const Treebank& tb : treebanks) {
    if (tb.sentences.empty())
      fail(ErrorCode::Data, "EmptyTreebank: treebank '" + tb.name + "' has no sentences");
    for (const Sentence& s : tb.sentences) {
      for (const Token& tok : s.tokens) {
        if (tok.head == kHeadUnset)
          fail(ErrorCode::Data, "treebank '" + tb.name + "' has a token without a gold head");
        if (tok.deprel == "_" || tok.upos == "_")
          fail(ErrorCode::Data,
               "treebank '" + tb.name + "' has a token without gold deprel or UPOS");
      }
    }
  }
}

}  // namespace

ParserModel train(const ModelConfig& config, const TrainSchedule& schedule,
                  std::span<const Treebank> treebanks, TrainObserver* observer) {
  config.validate();
  schedule.validate();
  validate_training_data(treebanks);

  ParserModel model = init_model(config, build_vocabularies(config, treebanks));

  std::vector<std::size_t> counts;
  for (const Treebank& tb : treebanks) counts.push_back(tb.sentence_count());
  BatchSampler sampler(derive_seed(config.seed, /*stream=*/1), counts);

  std::vector<bool> frozen_mask(model.params.size(), false);
  std::vector<bool> none_frozen(model.params.size(), false);
  for (std::size_t i = 0; i < model.params.size(); ++i)
    frozen_mask[i] = model.params[i].name.starts_with("emb.");

  auto run_batch = [&](Adam& adam, double lr, const std::vector<bool>& mask) {
    std::vector<const Sentence*> batch;
    for (auto [tb, sent] : sampler.next_batch(schedule.batch_size))
      batch.push_back(&treebanks[tb].sentences[sent]);
    double mean_loss = 0.0;
    GradientList grads = gradients(model, batch, &mean_loss);
    adam.step(model, grads, lr, mask);
    return mean_loss;
  };

  if (schedule.frozen_epochs > 0) {
    if (observer) observer->stage_started(1, model);
    Adam adam(model);
    for (int epoch = 0; epoch < schedule.frozen_epochs; ++epoch) {
      double epoch_loss = 0.0;
      for (int b = 0; b < schedule.batches_per_epoch; ++b)
        epoch_loss += run_batch(adam, schedule.frozen_lr, frozen_mask);
      if (observer)
        observer->epoch_finished(1, epoch + 1, schedule.frozen_epochs,
                                 epoch_loss / std::max(1, schedule.batches_per_epoch));
    }
    if (observer) observer->stage_finished(1, model);
  }

  if (schedule.main_epochs > 0) {
    if (observer) observer->stage_started(2, model);
    Adam adam(model);
    long batch_index = 0;
    for (int epoch = 0; epoch < schedule.main_epochs; ++epoch) {
      double epoch_loss = 0.0;
      for (int b = 0; b < schedule.batches_per_epoch; ++b, ++batch_index)
        epoch_loss += run_batch(adam, fine_tune_lr(schedule, batch_index), none_frozen);
      if (observer)
        observer->epoch_finished(2, epoch + 1, schedule.main_epochs,
                                 epoch_loss / std::max(1, schedule.batches_per_epoch));
    }
    if (observer) observer->stage_finished(2, model);
  }

  return model;
}

}  // namespace arbor
