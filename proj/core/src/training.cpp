#include "mean/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mean/optimizer.hpp"

namespace mean {

GradCheckFailure::GradCheckFailure(GradCheckReport report)
    : std::runtime_error("gradient audit failed: max relative error " + std::to_string(report.max_rel_error)),
      report_(std::move(report)) {}

std::size_t EvalResult::class_total(std::size_t c) const {
  return std::accumulate(confusion[c].begin(), confusion[c].end(), std::size_t{0});
}

namespace {

std::vector<Tensor> regularized_tensors(const ParameterList& params) {
  std::vector<Tensor> out;
  for (const auto& p : params)
    if (p.regularized) out.push_back(p.value);
  return out;
}

}  // namespace

BatchResult batch_loss(const Model& model, std::span<const Example* const> batch, Mode mode, Rng& rng) {
  const std::size_t c = model.config().num_classes;
  std::vector<Tensor> predictions;
  std::vector<std::vector<double>> targets;
  std::vector<std::array<Tensor, kNumPaths>> outputs;
  BatchResult result;
  for (const Example* ex : batch) {
    auto pred = model.forward(ex->tokens, mode, &rng);
    if (pred.label == ex->label) ++result.correct;
    predictions.push_back(pred.probabilities);
    targets.push_back(one_hot(ex->label, c));
    outputs.push_back(pred.rep.outputs);
  }
  const auto reg = regularized_tensors(model.params().parameters());
  result.loss = total_loss(predictions, targets, reg, outputs, model.config().loss());
  return result;
}

std::vector<std::size_t> epoch_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Model initial_model(const TrainConfig& config, const TrainResources& resources, Rng& rng) {
  auto params = ModelParams::initialize(config, resources.vocab.size(), rng);
  return Model(config, std::move(params), resources.vocab, resources.bundle, resources.vectors);
}

GradCheckReport audit_gradients(const Model& model, const Example& example, const GradCheckOptions& options) {
  auto params = model.params().parameters();
  Rng unused(0);
  const Example* batch[] = {&example};
  return check_gradients([&] { return batch_loss(model, batch, Mode::Eval, unused).loss.total; }, params,
                         options);
}

TrainResult train(const TrainingData& data, const TrainConfig& config, const TrainResources& resources,
                  const TrainOptions& options) {
  config.validate();
  if (data.train.empty()) throw std::invalid_argument("train: empty training split");
  if (data.validation.empty()) throw std::invalid_argument("train: empty validation split");
  if (!resources.vectors) throw std::invalid_argument("train: no word vectors");

  Rng rng(config.rng_seed);
  Model model = initial_model(config, resources, rng);
  TrainResult result;
  result.initial = make_checkpoint(model, 0, 0.0, rng_state(rng));

  if (config.gradcheck) {
    GradCheckOptions gc;
    gc.max_entries_per_tensor = options.gradcheck_samples;
    gc.seed = config.rng_seed;
    auto report = audit_gradients(model, data.train.front(), gc);
    if (!report.passed) throw GradCheckFailure(std::move(report));
  }

  auto params = model.params().parameters();
  RmsProp optimizer(params, {config.learning_rate, config.rmsprop_decay, config.rmsprop_epsilon});

  double best_accuracy = -1.0;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochMetrics metrics;
    metrics.epoch = epoch;
    const auto order = epoch_order(data.train.size(), rng);
    std::vector<const Example*> batch;
    for (std::size_t start = 0, b = 0; start < order.size(); start += config.batch_size, ++b) {
      batch.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + config.batch_size); ++k) {
        batch.push_back(&data.train[order[k]]);
      }
      for (auto& p : params) p.value.zero_grad();
      auto step = batch_loss(model, batch, Mode::Train, rng);
      const double loss = step.loss.total.item();
      if (!std::isfinite(loss)) throw DivergenceError(epoch, b);
      backward(step.loss.total);
      optimizer.step(params);
      metrics.batch_losses.push_back(loss);
      metrics.train_loss += loss;
    }

    metrics.validation_accuracy = evaluate(data.validation, model).accuracy;
    if (options.track_train_accuracy || options.stop_at_perfect_train) {
      metrics.train_accuracy = evaluate(data.train, model).accuracy;
    }
    result.history.push_back(metrics);
    if (options.on_epoch) options.on_epoch(metrics);

    if (metrics.validation_accuracy > best_accuracy) {
      best_accuracy = metrics.validation_accuracy;
      since_best = 0;
      result.best = make_checkpoint(model, epoch, best_accuracy, rng_state(rng));
    } else if (++since_best >= config.patience) {
      break;
    }
    if (options.stop_at_perfect_train && metrics.train_accuracy >= 1.0) break;
  }
  result.last = make_checkpoint(model, result.history.back().epoch, result.history.back().validation_accuracy,
                                rng_state(rng));
  return result;
}

EvalResult evaluate(std::span<const Example> examples, const Model& model) {
  if (examples.empty()) throw std::invalid_argument("evaluate: empty split");
  const std::size_t c = model.config().num_classes;
  EvalResult result;
  result.confusion.assign(c, std::vector<std::size_t>(c, 0));
  for (const auto& ex : examples) {
    if (ex.label >= c) {
      throw std::invalid_argument("evaluate: label " + std::to_string(ex.label) + " but the model has " +
                                  std::to_string(c) + " classes");
    }
  }
  NoGradGuard no_grad;
  for (const auto& ex : examples) {
    const auto pred = model.forward(ex.tokens, Mode::Eval);
    ++result.confusion[ex.label][pred.label];
    if (pred.label == ex.label) ++result.correct;
  }
  result.total = examples.size();
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.total);
  return result;
}

}  // namespace mean
