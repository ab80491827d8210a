#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metaphor/baseline.hpp"
#include "metaphor/config.hpp"
#include "metaphor/embeddings.hpp"
#include "metaphor/metrics.hpp"
#include "metaphor/models.hpp"

namespace metaphor {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_f1 = 0.0;
  double dev_accuracy = 0.0;
};

struct History {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
  std::string stop_reason;
};

/// Seed for a model's initial parameters under `config`.
std::uint64_t model_seed(const TrainConfig& config);

/// One sentence per update over a seeded shuffle of `train`. After each epoch
/// the dev set is scored; the parameters with the best (dev F1, dev accuracy)
/// are restored at the end. Stops after `patience` epochs without
/// improvement, at `max_epochs`, or once dev accuracy reaches
/// `target_dev_accuracy`, in which case that epoch's parameters are kept.
/// Throws TrainingError on a non-finite loss.
History train(Model& model, const EmbeddingStore& store, std::span<const Example> train,
              std::span<const Example> dev, const TrainConfig& config);

/// Eval-mode predictions shaped for `score`.
std::vector<std::vector<int>> predict_all(const Model& model, const EmbeddingStore& store,
                                          std::span<const Example> examples, EvalUnit unit);
std::vector<std::vector<int>> predict_all(const LexicalBaseline& baseline,
                                          std::span<const Example> examples, EvalUnit unit);

EvalReport evaluate(const Model& model, const EmbeddingStore& store,
                    std::span<const Example> examples, EvalUnit unit);
EvalReport evaluate(const LexicalBaseline& baseline, std::span<const Example> examples,
                    EvalUnit unit);

/// Mean per-example training-mode loss with dropout off, no updates.
double mean_loss(const Model& model, const EmbeddingStore& store, std::span<const Example> examples);

}  // namespace metaphor
