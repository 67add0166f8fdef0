#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mean/checkpoint.hpp"
#include "mean/classifier.hpp"
#include "mean/config.hpp"
#include "mean/data.hpp"
#include "mean/gradcheck.hpp"
#include "mean/model.hpp"
#include "mean/random.hpp"

namespace mean {

/// Non-finite loss during training.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, std::size_t batch)
      : std::runtime_error("loss diverged (non-finite) at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch)),
        epoch_(epoch),
        batch_(batch) {}
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

/// The pre-training gradient audit found a mismatch.
class GradCheckFailure : public std::runtime_error {
 public:
  explicit GradCheckFailure(GradCheckReport report);
  const GradCheckReport& report() const { return report_; }

 private:
  GradCheckReport report_;
};

struct TrainingData {
  std::vector<Example> train;
  std::vector<Example> validation;
};

/// Frozen inputs shared by every model built during training.
struct TrainResources {
  std::shared_ptr<const WordVectorStore> vectors;
  ResourceBundle bundle;
  CharVocab vocab;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // sum of batch losses
  double validation_accuracy = 0.0;
  double train_accuracy = -1.0;  // eval-mode accuracy on the training split, when tracked
  std::vector<double> batch_losses;
};

struct TrainOptions {
  bool track_train_accuracy = false;
  /// Stop as soon as eval-mode training accuracy reaches 1.
  bool stop_at_perfect_train = false;
  /// Entries per tensor sampled by the pre-training gradient audit.
  std::size_t gradcheck_samples = 16;
  std::function<void(const EpochMetrics&)> on_epoch;
};

struct TrainResult {
  Checkpoint initial;  // parameters and rng state before the first update
  Checkpoint best;     // highest validation accuracy (earliest on ties)
  Checkpoint last;
  std::vector<EpochMetrics> history;
};

struct EvalResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;

  std::size_t class_total(std::size_t c) const;
  std::size_t class_correct(std::size_t c) const { return confusion[c][c]; }
};

struct BatchResult {
  LossTerms loss;
  std::size_t correct = 0;
};

/// Builds the summed loss of one batch (cross-entropy and penalty per example, L2 once).
BatchResult batch_loss(const Model& model, std::span<const Example* const> batch, Mode mode, Rng& rng);

/// Seeded permutation of [0, n).
std::vector<std::size_t> epoch_order(std::size_t n, Rng& rng);

/// Fresh model with orthogonal weights drawn from `rng`.
Model initial_model(const TrainConfig& config, const TrainResources& resources, Rng& rng);

/// Finite-difference audit of the full loss on one example (eval mode).
GradCheckReport audit_gradients(const Model& model, const Example& example, const GradCheckOptions& options);

/// RMSprop mini-batch training with per-epoch validation and early stopping.
TrainResult train(const TrainingData& data, const TrainConfig& config, const TrainResources& resources,
                  const TrainOptions& options = {});

/// Dropout off; throws std::invalid_argument on an empty split and on labels ≥ num_classes.
EvalResult evaluate(std::span<const Example> examples, const Model& model);

}  // namespace mean
