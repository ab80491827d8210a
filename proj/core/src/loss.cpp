#include "metaphor/loss.hpp"

#include "metaphor/errors.hpp"
#include "metaphor/ops.hpp"

namespace metaphor {

Tensor nll_loss(const Tensor& logits, int gold) {
  if (logits.shape() != Shape{2}) {
    throw DimensionError("nll_loss expects two logits, got " + shape_string(logits.shape()));
  }
  if (gold != 0 && gold != 1) throw DomainError("gold label must be 0 or 1");
  return scale(pick(log_softmax(logits), static_cast<std::size_t>(gold)), -1.0);
}

int argmax_label(const Tensor& logits) {
  if (logits.shape() != Shape{2}) {
    throw DimensionError("argmax_label expects two logits, got " + shape_string(logits.shape()));
  }
  return logits.at(1) > logits.at(0) ? 1 : 0;
}

}  // namespace metaphor
