#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaphor/random.hpp"
#include "metaphor/tensor.hpp"

namespace metaphor {

enum class Mode { train, eval };

enum class InitScheme {
  xavier,  // Xavier-uniform weights, zero biases, forget-gate bias +1
  zeros,   // every parameter zero (cold-start checks)
};

using NamedTensor = std::pair<std::string, Tensor>;

std::vector<double> xavier_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng);

/// Lookup table of row vectors. A frozen table hands out detached copies, so
/// nothing downstream can write into it.
class EmbeddingLayer {
 public:
  EmbeddingLayer() = default;
  EmbeddingLayer(Tensor table, bool trainable, std::size_t unk_index = 0);

  Tensor lookup(std::size_t index) const;

  std::size_t rows() const { return table_.dim(0); }
  std::size_t dim() const { return table_.dim(1); }
  bool trainable() const { return trainable_; }
  std::size_t unk_index() const { return unk_index_; }
  const Tensor& table() const { return table_; }

 private:
  Tensor table_;
  bool trainable_ = false;
  std::size_t unk_index_ = 0;
};

struct LstmState {
  Tensor h;
  Tensor c;
};

/// One LSTM direction:
///   i = σ(W_i[x;h]+b_i)  f = σ(W_f[x;h]+b_f)  o = σ(W_o[x;h]+b_o)  g = tanh(W_g[x;h]+b_g)
///   c' = f⊙c + i⊙g       h' = o⊙tanh(c')
/// The stacked gate matrix [W_i;W_f;W_o;W_g] is stored as its input block
/// `w_input` {4h, din} and recurrent block `w_hidden` {4h, h}, so the input
/// projection of a whole sentence is one matrix product.
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(std::size_t input_dim, std::size_t hidden_dim, InitScheme init, Rng& rng);
  LstmCell(Tensor w_input, Tensor w_hidden, Tensor bias);

  LstmState step(const Tensor& x, const LstmState& prev) const;

  /// Step with the input already projected: `projected` = W_input · x, shape {4h}.
  LstmState step_projected(const Tensor& projected, const LstmState& prev) const;

  LstmState initial_state() const;

  std::size_t input_dim() const { return w_input_.dim(1); }
  std::size_t hidden_dim() const { return w_hidden_.dim(1); }
  const Tensor& input_weight() const { return w_input_; }

  std::vector<NamedTensor> named_parameters(const std::string& prefix) const;

 private:
  Tensor w_input_;
  Tensor w_hidden_;
  Tensor bias_;
};

class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(std::size_t input_dim, std::size_t hidden_dim, InitScheme init, Rng& rng);
  BiLstm(LstmCell forward, LstmCell backward);

  /// Position i of the result is [forward state after x_1..x_i ; backward
  /// state after x_n..x_i], shape {2h}. Initial states are zero.
  std::vector<Tensor> run(std::span<const Tensor> inputs) const;

  const LstmCell& forward_cell() const { return forward_; }
  const LstmCell& backward_cell() const { return backward_; }
  std::size_t input_dim() const { return forward_.input_dim(); }
  std::size_t hidden_dim() const { return forward_.hidden_dim(); }
  std::size_t output_dim() const { return 2 * hidden_dim(); }

  std::vector<NamedTensor> named_parameters(const std::string& prefix) const;

 private:
  LstmCell forward_;
  LstmCell backward_;
};

struct AttentionOutput {
  Tensor pooled;   // c = Σ a_i h_i
  Tensor weights;  // a = softmax_i(W_a h_i + b_a)
};

class Attention {
 public:
  Attention() = default;
  Attention(std::size_t state_dim, InitScheme init, Rng& rng);
  Attention(Tensor weight, Tensor bias);

  AttentionOutput pool(std::span<const Tensor> states) const;

  std::vector<NamedTensor> named_parameters(const std::string& prefix) const;

 private:
  Tensor weight_;  // {1, 2h}
  Tensor bias_;    // {1}
};

/// One ReLU hidden layer, then a linear map to two logits (literal, metaphor).
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(std::size_t input_dim, std::size_t hidden_dim, InitScheme init, Rng& rng);
  FeedForward(Tensor w_hidden, Tensor b_hidden, Tensor w_out, Tensor b_out);

  Tensor forward(const Tensor& x) const;

  std::vector<NamedTensor> named_parameters(const std::string& prefix) const;

 private:
  Tensor w_hidden_;
  Tensor b_hidden_;
  Tensor w_out_;
  Tensor b_out_;
};

/// Inverted dropout: in train mode each element is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate). Eval mode returns `x`.
Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng);

}  // namespace metaphor
