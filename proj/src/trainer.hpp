#ifndef ARBOR_TRAINER_HPP
#define ARBOR_TRAINER_HPP

#include <span>

#include "model.hpp"

namespace arbor {

struct TrainSchedule {
  int frozen_epochs = 10;
  double frozen_lr = 1e-3;
  int main_epochs = 30;
  int batches_per_epoch = 1000;
  int batch_size = 32;
  double peak_lr = 2e-5;
  int warmup_epochs = 2;

  void validate() const;
  friend bool operator==(const TrainSchedule&, const TrainSchedule&) = default;
};

// Fine-tuning learning rate at 0-based batch index t: linear 0 -> peak over
// the warmup batches, then cosine decay reaching 0 at the final batch.
double fine_tune_lr(const TrainSchedule& schedule, long batch_index);

struct TrainObserver {
  virtual ~TrainObserver() = default;
  virtual void stage_started(int stage, const ParserModel& model) { (void)stage, (void)model; }
  virtual void stage_finished(int stage, const ParserModel& model) { (void)stage, (void)model; }
  virtual void epoch_finished(int stage, int epoch, int total_epochs, double mean_loss) {
    (void)stage, (void)epoch, (void)total_epochs, (void)mean_loss;
  }
};

// Two-stage schedule: embedding tables frozen at constant frozen_lr, then
// every parameter with warmup + cosine decay. Deterministic per seed.
ParserModel train(const ModelConfig& config, const TrainSchedule& schedule,
                  std::span<const Treebank> treebanks, TrainObserver* observer = nullptr);

}  // namespace arbor

#endif
