#pragma once

#include "metaphor/tensor.hpp"

namespace metaphor {

/// -log softmax(logits)[gold] for a two-logit vector.
Tensor nll_loss(const Tensor& logits, int gold);

/// Class argmax of two logits; a tie goes to literal (0).
int argmax_label(const Tensor& logits);

}  // namespace metaphor
