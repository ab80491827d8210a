#include "metaphor/optimizer.hpp"

#include <cmath>

#include "metaphor/errors.hpp"

namespace metaphor {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::vector<Tensor> params,
                     AdamSettings adam)
    : kind_(kind), learning_rate_(learning_rate), params_(std::move(params)), adam_(adam) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive, got " + std::to_string(learning_rate));
  }
  for (const auto& p : params_) {
    if (!p.requires_grad()) throw ConfigError("optimizer given a tensor that does not require grad");
  }
  if (kind_ == OptimizerKind::adam) {
    for (const auto& p : params_) {
      first_moment_.emplace_back(p.size(), 0.0);
      second_moment_.emplace_back(p.size(), 0.0);
    }
  }
}

void Optimizer::step() {
  ++timestep_;
  if (kind_ == OptimizerKind::sgd) {
    for (const auto& p : params_) {
      auto value = p.mutable_data();
      auto grad = p.grad();
      for (std::size_t i = 0; i < value.size(); ++i) value[i] -= learning_rate_ * grad[i];
    }
    return;
  }
  const double t = static_cast<double>(timestep_);
  const double correction1 = 1.0 - std::pow(adam_.beta1, t);
  const double correction2 = 1.0 - std::pow(adam_.beta2, t);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto value = params_[k].mutable_data();
    auto grad = params_[k].grad();
    auto& m = first_moment_[k];
    auto& v = second_moment_[k];
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = adam_.beta1 * m[i] + (1.0 - adam_.beta1) * grad[i];
      v[i] = adam_.beta2 * v[i] + (1.0 - adam_.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      value[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + adam_.epsilon);
    }
  }
}

void Optimizer::zero_grads() { metaphor::zero_grads(params_); }

double clip_grad_norm(std::span<const Tensor> params, double max_norm) {
  double squared = 0.0;
  for (const auto& p : params) {
    for (double g : p.grad()) squared += g * g;
  }
  const double norm = std::sqrt(squared);
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (const auto& p : params) {
      for (auto& g : p.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

}  // namespace metaphor
