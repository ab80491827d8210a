#include "metaphor/cross_validation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "metaphor/errors.hpp"
#include "metaphor/random.hpp"

namespace metaphor {

namespace {

constexpr std::uint64_t kFoldPlanStream = 100;
constexpr std::uint64_t kFoldStreamBase = 1000;

FoldResult run_fold(std::span<const Example> examples, const EmbeddingStore& store,
                    const TrainConfig& base, const FoldPlan& plan, std::size_t fold) {
  FoldResult result;
  result.fold = fold;
  result.seed = derive_seed(base.seed, kFoldStreamBase + fold);

  const auto test_idx = plan.test_indices(fold);
  const auto train_idx = plan.train_indices(fold);
  const auto test = select(examples, test_idx);
  const auto pool = select(examples, train_idx);
  auto split = dev_split(pool, base.dev_fraction, derive_seed(result.seed, 1));

  TrainConfig config = base;
  config.seed = result.seed;
  auto model = make_model(config.model, model_seed(config));
  result.history = train(*model, store, split.train, split.dev, config);
  result.report = evaluate(*model, store, test, eval_unit_for(examples));
  result.train_size = split.train.size();
  result.dev_size = split.dev.size();
  result.test_size = test.size();
  return result;
}

}  // namespace

MetricStats summarize(std::span<const double> values) {
  MetricStats stats;
  if (values.empty()) return stats;
  double total = 0.0;
  for (double v : values) total += v;
  stats.mean = total / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return stats;
}

CvReport run_cv(std::span<const Example> examples, const EmbeddingStore& store,
                const TrainConfig& config, std::size_t k, std::size_t jobs) {
  config.validate();
  const auto plan = make_folds(examples, k, derive_seed(config.seed, kFoldPlanStream));

  std::vector<FoldResult> results(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t f = next++; f < k; f = next++) {
      try {
        results[f] = run_fold(examples, store, config, plan, f);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const auto threads = std::max<std::size_t>(1, std::min(jobs, k));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t f = 0; f < k; ++f) {
    if (!errors[f]) continue;
    try {
      std::rethrow_exception(errors[f]);
    } catch (const std::exception& e) {
      throw TrainingError("fold " + std::to_string(f) + ": " + e.what());
    }
  }

  CvReport report;
  report.k = k;
  report.seed = config.seed;
  report.pooled.unit = eval_unit_for(examples);
  std::vector<double> p, r, f1, acc;
  for (auto& fold : results) {
    report.pooled.merge(fold.report);
    p.push_back(fold.report.precision());
    r.push_back(fold.report.recall());
    f1.push_back(fold.report.f1());
    acc.push_back(fold.report.accuracy());
  }
  report.folds = std::move(results);
  report.precision = summarize(p);
  report.recall = summarize(r);
  report.f1 = summarize(f1);
  report.accuracy = summarize(acc);
  return report;
}

}  // namespace metaphor
