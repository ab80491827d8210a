#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metaphor/example.hpp"

namespace metaphor {

/// Label-stratified assignment of examples (by position) to k folds.
struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // fold index per example position

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Shuffles each label stratum with `seed` and deals the concatenation
/// round-robin, so fold sizes differ by at most one and every fold gets its
/// share of each label.
FoldPlan make_folds(std::span<const Example> examples, std::size_t k, std::uint64_t seed);

struct TrainDevSplit {
  std::vector<Example> train;
  std::vector<Example> dev;
};

/// Stratified hold-out: |dev| = round(fraction * N), apportioned across label
/// strata by largest remainder. Both parts keep the input order.
TrainDevSplit dev_split(std::span<const Example> examples, double fraction, std::uint64_t seed);

std::vector<Example> select(std::span<const Example> examples, std::span<const std::size_t> indices);

}  // namespace metaphor
