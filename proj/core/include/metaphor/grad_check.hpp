#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "metaphor/tensor.hpp"

namespace metaphor {

struct GradCheckReport {
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  std::size_t checked = 0;
  std::size_t failures = 0;
  // Location of the worst coordinate: parameter position and flat index.
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;

  bool passed() const { return failures == 0; }
  std::string summary() const;
};

/// Compares autodiff gradients of `loss_fn` against central finite differences
/// for every coordinate of every parameter. `loss_fn` must rebuild the graph on
/// each call and be deterministic (dropout off).
///
/// Relative error is |a - n| / max(|a|, |n|, floor); the floor keeps
/// coordinates whose true gradient is ~0 from reporting pure rounding noise.
GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, std::span<const Tensor> params,
                           double tolerance, double step = 1e-5, double floor = 1e-6);

}  // namespace metaphor
