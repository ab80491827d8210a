#include "metaphor/training.hpp"

#include <cmath>
#include <numeric>

#include "metaphor/errors.hpp"
#include "metaphor/optimizer.hpp"

namespace metaphor {

namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;

bool improves(double f1, double accuracy, double best_f1, double best_accuracy) {
  return f1 > best_f1 || (f1 == best_f1 && accuracy > best_accuracy);
}

}  // namespace

std::uint64_t model_seed(const TrainConfig& config) { return derive_seed(config.seed, kInitStream); }

History train(Model& model, const EmbeddingStore& store, std::span<const Example> train,
              std::span<const Example> dev, const TrainConfig& config) {
  config.validate();
  if (train.empty()) throw DomainError("training set is empty");
  if (dev.empty()) throw DomainError("dev set is empty");
  if (config.model != model.config()) throw ConfigError("train config does not match the model");
  model.check_store(store);

  const auto params = model.parameters();
  Optimizer optimizer(config.optimizer, config.learning_rate, params);
  Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
  Rng dropout_rng(derive_seed(config.seed, kDropoutStream));
  const EvalUnit dev_unit = eval_unit_for(dev);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  History history;
  double best_accuracy = -1.0;
  history.best_dev_f1 = -1.0;
  auto best_params = snapshot_parameters(model);
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double total_loss = 0.0;
    for (auto i : order) {
      const Tensor loss = model.loss(train[i], store, Mode::train, dropout_rng);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw TrainingError("loss became non-finite in epoch " + std::to_string(epoch) +
                            " (example '" + train[i].id + "')");
      }
      total_loss += value;
      backward(loss);
      clip_grad_norm(params, config.clip_norm);
      optimizer.step();
      optimizer.zero_grads();
    }

    const auto report = evaluate(model, store, dev, dev_unit);
    EpochRecord record{epoch, total_loss / static_cast<double>(train.size()), report.f1(),
                       report.accuracy()};
    history.epochs.push_back(record);

    if (improves(record.dev_f1, record.dev_accuracy, history.best_dev_f1, best_accuracy)) {
      history.best_dev_f1 = record.dev_f1;
      history.best_epoch = epoch;
      best_accuracy = record.dev_accuracy;
      best_params = snapshot_parameters(model);
      since_best = 0;
    } else {
      ++since_best;
    }

    if (record.dev_accuracy >= config.target_dev_accuracy) {
      // The model that reached the target is the one kept.
      history.best_dev_f1 = record.dev_f1;
      history.best_epoch = epoch;
      best_params = snapshot_parameters(model);
      history.stop_reason = "target dev accuracy reached";
      break;
    }
    if (since_best >= config.patience) {
      history.stop_reason = "patience exhausted";
      break;
    }
    if (epoch == config.max_epochs) history.stop_reason = "max epochs reached";
  }
  restore_parameters(model, best_params);
  return history;
}

std::vector<std::vector<int>> predict_all(const Model& model, const EmbeddingStore& store,
                                          std::span<const Example> examples, EvalUnit unit) {
  std::vector<std::vector<int>> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (unit == EvalUnit::token) {
      out.push_back(model.predict_tokens(ex, store));
    } else {
      out.push_back({model.predict_target(ex, store)});
    }
  }
  return out;
}

std::vector<std::vector<int>> predict_all(const LexicalBaseline& baseline,
                                          std::span<const Example> examples, EvalUnit unit) {
  std::vector<std::vector<int>> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (unit == EvalUnit::token) {
      std::vector<int> labels;
      labels.reserve(ex.size());
      for (const auto& token : ex.tokens) labels.push_back(baseline.predict(token));
      out.push_back(std::move(labels));
    } else {
      if (!ex.target_index) throw DomainError("example '" + ex.id + "' has no target index");
      out.push_back({baseline.predict(ex.tokens[*ex.target_index])});
    }
  }
  return out;
}

EvalReport evaluate(const Model& model, const EmbeddingStore& store,
                    std::span<const Example> examples, EvalUnit unit) {
  const auto predictions = predict_all(model, store, examples, unit);
  return score(examples, predictions, unit);
}

EvalReport evaluate(const LexicalBaseline& baseline, std::span<const Example> examples,
                    EvalUnit unit) {
  const auto predictions = predict_all(baseline, examples, unit);
  return score(examples, predictions, unit);
}

double mean_loss(const Model& model, const EmbeddingStore& store, std::span<const Example> examples) {
  if (examples.empty()) throw DomainError("mean_loss over no examples");
  Rng unused(0);
  double total = 0.0;
  for (const auto& ex : examples) total += model.loss(ex, store, Mode::eval, unused).item();
  return total / static_cast<double>(examples.size());
}

}  // namespace metaphor
