#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metaphor/config.hpp"
#include "metaphor/embeddings.hpp"
#include "metaphor/metrics.hpp"
#include "metaphor/splits.hpp"
#include "metaphor/training.hpp"

namespace metaphor {

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t dev_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  History history;
  EvalReport report;
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

MetricStats summarize(std::span<const double> values);

struct CvReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  EvalReport pooled;
  MetricStats precision, recall, f1, accuracy;
};

/// k-fold cross-validation. Each fold trains a fresh model on the other folds
/// minus a stratified dev carve-out (config.dev_fraction) used for early
/// stopping, then scores the held-out fold. Folds run on up to `jobs` threads;
/// results do not depend on `jobs`.
CvReport run_cv(std::span<const Example> examples, const EmbeddingStore& store,
                const TrainConfig& config, std::size_t k = 10, std::size_t jobs = 1);

}  // namespace metaphor
