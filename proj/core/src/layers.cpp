#include "metaphor/layers.hpp"

#include <cmath>

#include "metaphor/errors.hpp"
#include "metaphor/ops.hpp"

namespace metaphor {

namespace {

Tensor init_weight(std::size_t rows, std::size_t cols, std::size_t fan_out, std::size_t fan_in,
                   InitScheme init, Rng& rng) {
  if (init == InitScheme::zeros) return Tensor::zeros({rows, cols}, true);
  // Xavier bounds come from the full layer fan, which may be wider than this block.
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> values(rows * cols);
  for (auto& v : values) v = rng.uniform(-limit, limit);
  return Tensor::parameter({rows, cols}, std::move(values));
}

std::vector<NamedTensor> prefixed(const std::string& prefix,
                                  std::initializer_list<NamedTensor> items) {
  std::vector<NamedTensor> out;
  for (const auto& [name, t] : items) out.emplace_back(prefix + name, t);
  return out;
}

}  // namespace

std::vector<double> xavier_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> values(fan_out * fan_in);
  for (auto& v : values) v = rng.uniform(-limit, limit);
  return values;
}

// ---------------------------------------------------------------------------
// EmbeddingLayer

EmbeddingLayer::EmbeddingLayer(Tensor table, bool trainable, std::size_t unk_index)
    : table_(std::move(table)), trainable_(trainable), unk_index_(unk_index) {
  if (table_.rank() != 2) {
    throw DimensionError("embedding table must be a matrix, got " + shape_string(table_.shape()));
  }
  if (unk_index_ >= rows()) throw LookupError("unk index outside embedding table");
  if (trainable_ != table_.requires_grad()) {
    table_ = trainable_ ? Tensor::parameter(table_.shape(), table_.to_vector()) : table_.detach();
  }
}

Tensor EmbeddingLayer::lookup(std::size_t index) const {
  if (index >= rows()) {
    throw LookupError("embedding index " + std::to_string(index) + " out of range (" +
                      std::to_string(rows()) + " rows)");
  }
  if (trainable_) return row(table_, index);
  const auto d = dim();
  const auto data = table_.data();
  return Tensor::constant({d}, std::vector<double>(data.begin() + index * d,
                                                   data.begin() + (index + 1) * d));
}

// ---------------------------------------------------------------------------
// LstmCell

LstmCell::LstmCell(std::size_t input_dim, std::size_t hidden_dim, InitScheme init, Rng& rng) {
  if (input_dim == 0 || hidden_dim == 0) throw DimensionError("LSTM dims must be positive");
  const auto gates = 4 * hidden_dim;
  const auto fan_in = input_dim + hidden_dim;
  w_input_ = init_weight(gates, input_dim, gates, fan_in, init, rng);
  w_hidden_ = init_weight(gates, hidden_dim, gates, fan_in, init, rng);
  std::vector<double> b(gates, 0.0);
  if (init == InitScheme::xavier) {
    for (std::size_t j = hidden_dim; j < 2 * hidden_dim; ++j) b[j] = 1.0;
  }
  bias_ = Tensor::parameter({gates}, std::move(b));
}

LstmCell::LstmCell(Tensor w_input, Tensor w_hidden, Tensor bias)
    : w_input_(std::move(w_input)), w_hidden_(std::move(w_hidden)), bias_(std::move(bias)) {
  if (w_input_.rank() != 2 || w_hidden_.rank() != 2 || bias_.rank() != 1 ||
      w_hidden_.dim(0) != 4 * w_hidden_.dim(1) || w_input_.dim(0) != w_hidden_.dim(0) ||
      bias_.dim(0) != w_hidden_.dim(0)) {
    throw DimensionError("inconsistent LSTM parameter shapes " + shape_string(w_input_.shape()) +
                         ", " + shape_string(w_hidden_.shape()) + ", " +
                         shape_string(bias_.shape()));
  }
}

LstmState LstmCell::initial_state() const {
  return {Tensor::zeros({hidden_dim()}), Tensor::zeros({hidden_dim()})};
}

LstmState LstmCell::step(const Tensor& x, const LstmState& prev) const {
  if (x.shape() != Shape{input_dim()}) {
    throw DimensionError("LSTM input " + shape_string(x.shape()) + " does not match input dim " +
                         std::to_string(input_dim()));
  }
  return step_projected(linear(x, w_input_), prev);
}

LstmState LstmCell::step_projected(const Tensor& projected, const LstmState& prev) const {
  const auto h = hidden_dim();
  if (prev.h.shape() != Shape{h} || prev.c.shape() != Shape{h}) {
    throw DimensionError("LSTM state " + shape_string(prev.h.shape()) + "/" +
                         shape_string(prev.c.shape()) + " does not match hidden dim " +
                         std::to_string(h));
  }
  const Tensor z = add(projected, linear(prev.h, w_hidden_, bias_));
  const Tensor input_gate = sigmoid(slice(z, 0, h));
  const Tensor forget_gate = sigmoid(slice(z, h, h));
  const Tensor output_gate = sigmoid(slice(z, 2 * h, h));
  const Tensor candidate = tanh(slice(z, 3 * h, h));
  Tensor c = add(mul(forget_gate, prev.c), mul(input_gate, candidate));
  Tensor hidden = mul(output_gate, tanh(c));
  return {std::move(hidden), std::move(c)};
}

std::vector<NamedTensor> LstmCell::named_parameters(const std::string& prefix) const {
  return prefixed(prefix, {{"w_input", w_input_}, {"w_hidden", w_hidden_}, {"bias", bias_}});
}

// ---------------------------------------------------------------------------
// BiLstm

BiLstm::BiLstm(std::size_t input_dim, std::size_t hidden_dim, InitScheme init, Rng& rng)
    : forward_(input_dim, hidden_dim, init, rng), backward_(input_dim, hidden_dim, init, rng) {}

BiLstm::BiLstm(LstmCell forward, LstmCell backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
  if (forward_.input_dim() != backward_.input_dim() ||
      forward_.hidden_dim() != backward_.hidden_dim()) {
    throw DimensionError("BiLSTM directions disagree on dimensions");
  }
}

std::vector<Tensor> BiLstm::run(std::span<const Tensor> inputs) const {
  if (inputs.empty()) throw DomainError("BiLSTM over an empty sequence");
  for (const auto& x : inputs) {
    if (x.shape() != Shape{input_dim()}) {
      throw DimensionError("BiLSTM input " + shape_string(x.shape()) +
                           " does not match input dim " + std::to_string(input_dim()));
    }
  }
  const auto n = inputs.size();
  const Tensor sequence = stack(inputs);
  const Tensor forward_proj = linear(sequence, forward_.input_weight());
  const Tensor backward_proj = linear(sequence, backward_.input_weight());

  std::vector<Tensor> forward_states(n), backward_states(n);
  LstmState state = forward_.initial_state();
  for (std::size_t t = 0; t < n; ++t) {
    state = forward_.step_projected(row(forward_proj, t), state);
    forward_states[t] = state.h;
  }
  state = backward_.initial_state();
  for (std::size_t t = n; t-- > 0;) {
    state = backward_.step_projected(row(backward_proj, t), state);
    backward_states[t] = state.h;
  }
  std::vector<Tensor> outputs;
  outputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) outputs.push_back(concat({forward_states[t], backward_states[t]}));
  return outputs;
}

std::vector<NamedTensor> BiLstm::named_parameters(const std::string& prefix) const {
  auto out = forward_.named_parameters(prefix + "forward.");
  for (auto& p : backward_.named_parameters(prefix + "backward.")) out.push_back(std::move(p));
  return out;
}

// ---------------------------------------------------------------------------
// Attention

Attention::Attention(std::size_t state_dim, InitScheme init, Rng& rng)
    : weight_(init_weight(1, state_dim, 1, state_dim, init, rng)),
      bias_(Tensor::zeros({1}, true)) {}

Attention::Attention(Tensor weight, Tensor bias) : weight_(std::move(weight)), bias_(std::move(bias)) {
  if (weight_.rank() != 2 || weight_.dim(0) != 1 || bias_.shape() != Shape{1}) {
    throw DimensionError("attention parameters must be {1, d} and {1}, got " +
                         shape_string(weight_.shape()) + " and " + shape_string(bias_.shape()));
  }
}

AttentionOutput Attention::pool(std::span<const Tensor> states) const {
  if (states.empty()) throw DomainError("attention over an empty sequence");
  const Tensor h = stack(states);  // {n, d}
  const auto n = h.dim(0);
  const Tensor scores = reshape(linear(h, weight_, bias_), {n});
  Tensor weights = softmax(scores);
  Tensor pooled = reshape(matmul(reshape(weights, {1, n}), h), {h.dim(1)});
  return {std::move(pooled), std::move(weights)};
}

std::vector<NamedTensor> Attention::named_parameters(const std::string& prefix) const {
  return prefixed(prefix, {{"weight", weight_}, {"bias", bias_}});
}

// ---------------------------------------------------------------------------
// FeedForward

FeedForward::FeedForward(std::size_t input_dim, std::size_t hidden_dim, InitScheme init, Rng& rng)
    : w_hidden_(init_weight(hidden_dim, input_dim, hidden_dim, input_dim, init, rng)),
      b_hidden_(Tensor::zeros({hidden_dim}, true)),
      w_out_(init_weight(2, hidden_dim, 2, hidden_dim, init, rng)),
      b_out_(Tensor::zeros({2}, true)) {}

FeedForward::FeedForward(Tensor w_hidden, Tensor b_hidden, Tensor w_out, Tensor b_out)
    : w_hidden_(std::move(w_hidden)),
      b_hidden_(std::move(b_hidden)),
      w_out_(std::move(w_out)),
      b_out_(std::move(b_out)) {
  if (w_hidden_.rank() != 2 || w_out_.rank() != 2 || w_out_.dim(0) != 2 ||
      w_out_.dim(1) != w_hidden_.dim(0) || b_hidden_.shape() != Shape{w_hidden_.dim(0)} ||
      b_out_.shape() != Shape{2}) {
    throw DimensionError("inconsistent feedforward parameter shapes");
  }
}

Tensor FeedForward::forward(const Tensor& x) const {
  if (x.shape() != Shape{w_hidden_.dim(1)}) {
    throw DimensionError("feedforward input " + shape_string(x.shape()) +
                         " does not match input dim " + std::to_string(w_hidden_.dim(1)));
  }
  return linear(relu(linear(x, w_hidden_, b_hidden_)), w_out_, b_out_);
}

std::vector<NamedTensor> FeedForward::named_parameters(const std::string& prefix) const {
  return prefixed(prefix, {{"w_hidden", w_hidden_},
                           {"b_hidden", b_hidden_},
                           {"w_out", w_out_},
                           {"b_out", b_out_}});
}

// ---------------------------------------------------------------------------

Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (mode == Mode::eval || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> factors(x.size());
  for (auto& f : factors) f = rng.bernoulli(rate) ? 0.0 : keep_scale;
  return mask(x, std::move(factors));
}

}  // namespace metaphor
