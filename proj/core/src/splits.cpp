#include "metaphor/splits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "metaphor/errors.hpp"
#include "metaphor/random.hpp"

namespace metaphor {

namespace {

// Positions grouped by stratum label, each group shuffled.
std::array<std::vector<std::size_t>, 2> shuffled_strata(std::span<const Example> examples,
                                                        std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> strata;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    strata[stratum_label(examples[i])].push_back(i);
  }
  Rng rng(seed);
  for (auto& s : strata) rng.shuffle(std::span<std::size_t>(s));
  return strata;
}

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : fold_of) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(std::span<const Example> examples, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DomainError("k-fold needs k >= 2, got " + std::to_string(k));
  if (examples.size() < k) {
    throw DomainError("cannot split " + std::to_string(examples.size()) + " examples into " +
                      std::to_string(k) + " folds");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_of.assign(examples.size(), 0);
  std::size_t dealt = 0;
  for (const auto& stratum : shuffled_strata(examples, seed)) {
    for (auto i : stratum) plan.fold_of[i] = dealt++ % k;
  }
  return plan;
}

TrainDevSplit dev_split(std::span<const Example> examples, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("dev fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  const auto n = examples.size();
  const auto dev_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (dev_size == 0 || dev_size >= n) {
    throw DomainError("dev split of " + std::to_string(n) + " examples at fraction " +
                      std::to_string(fraction) + " leaves an empty part");
  }

  auto strata = shuffled_strata(examples, seed);
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 2; ++s) {
    const double exact = fraction * static_cast<double>(strata[s].size());
    quota[s] = static_cast<std::size_t>(std::floor(exact));
    remainder[s] = exact - static_cast<double>(quota[s]);
    assigned += quota[s];
  }
  while (assigned < dev_size) {
    // Largest remainder first; ties go to the lower label. Skip full strata.
    std::size_t pick = remainder[0] >= remainder[1] ? 0 : 1;
    if (quota[pick] >= strata[pick].size()) pick = 1 - pick;
    ++quota[pick];
    remainder[pick] = -1.0;
    ++assigned;
  }

  std::vector<bool> in_dev(n, false);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t j = 0; j < quota[s]; ++j) in_dev[strata[s][j]] = true;
  }
  TrainDevSplit split;
  for (std::size_t i = 0; i < n; ++i) (in_dev[i] ? split.dev : split.train).push_back(examples[i]);
  return split;
}

std::vector<Example> select(std::span<const Example> examples, std::span<const std::size_t> indices) {
  std::vector<Example> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(examples[i]);
  return out;
}

}  // namespace metaphor
