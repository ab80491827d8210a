#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "metaphor/tensor.hpp"

namespace metaphor {

enum class OptimizerKind { sgd, adam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First-order optimizer over a fixed parameter list. `step` reads the current
/// gradients and never clears them; call `zero_grads` between updates.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::vector<Tensor> params,
            AdamSettings adam = {});

  void step();
  void zero_grads();

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }
  std::size_t timestep() const { return timestep_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  OptimizerKind kind_;
  double learning_rate_;
  std::vector<Tensor> params_;
  AdamSettings adam_;
  std::size_t timestep_ = 0;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
};

/// Rescales all gradients in place so their joint L2 norm is at most
/// `max_norm`. Returns the norm measured before clipping.
double clip_grad_norm(std::span<const Tensor> params, double max_norm);

}  // namespace metaphor
