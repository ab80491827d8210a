#include "metaphor/models.hpp"

#include <map>

#include "metaphor/errors.hpp"
#include "metaphor/loss.hpp"
#include "metaphor/ops.hpp"

namespace metaphor {

namespace {

EmbeddingLayer make_index_embedding(const ModelConfig& config, Rng& rng) {
  const auto d = config.index_dim;
  auto values = config.init == InitScheme::zeros ? std::vector<double>(2 * d, 0.0)
                                                 : xavier_uniform(2, d, rng);
  return EmbeddingLayer(Tensor::parameter({2, d}, std::move(values)), /*trainable=*/true);
}

}  // namespace

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

void Model::check_store(const EmbeddingStore& store) const {
  if (store.word_dim() != config_.word_dim) {
    throw DimensionError("model expects word vectors of dim " + std::to_string(config_.word_dim) +
                         " but embeddings have dim " + std::to_string(store.word_dim()));
  }
  if (store.context_dim() != config_.context_dim) {
    throw DimensionError("model expects contextual vectors of dim " +
                         std::to_string(config_.context_dim) + " but the store has dim " +
                         std::to_string(store.context_dim()));
  }
}

// ---------------------------------------------------------------------------
// SEQ

SeqModel::SeqModel(ModelConfig config, std::uint64_t seed) : Model(std::move(config)) {
  this->config().validate();
  if (kind() != ModelKind::seq) throw ConfigError("SeqModel built from a non-seq config");
  Rng rng(seed);
  const auto& c = this->config();
  encoder_ = BiLstm(c.lstm_input_dim(), c.hidden_dim, c.init, rng);
  head_ = FeedForward(2 * c.hidden_dim, c.ff_hidden_dim, c.init, rng);
}

std::vector<Tensor> SeqModel::forward(const Example& example, const EmbeddingStore& store,
                                      Mode mode, Rng& rng) const {
  if (example.tokens.empty()) throw DomainError("example '" + example.id + "' is empty");
  check_store(store);
  auto inputs = store.static_inputs(example);
  for (auto& x : inputs) x = dropout(x, config().lstm_input_dropout, mode, rng);
  const auto states = encoder_.run(inputs);
  std::vector<Tensor> logits;
  logits.reserve(states.size());
  for (const auto& h : states) logits.push_back(head_.forward(dropout(h, config().ff_input_dropout, mode, rng)));
  return logits;
}

std::vector<NamedTensor> SeqModel::named_parameters() const {
  auto out = encoder_.named_parameters("encoder.");
  for (auto& p : head_.named_parameters("head.")) out.push_back(std::move(p));
  return out;
}

Tensor SeqModel::loss(const Example& example, const EmbeddingStore& store, Mode mode,
                      Rng& rng) const {
  const auto logits = forward(example, store, mode, rng);
  std::vector<Tensor> terms;
  terms.reserve(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) terms.push_back(nll_loss(logits[i], example.labels[i]));
  return mean(terms);
}

std::vector<int> SeqModel::predict_tokens(const Example& example,
                                          const EmbeddingStore& store) const {
  Rng unused(0);
  const auto logits = forward(example, store, Mode::eval, unused);
  std::vector<int> labels;
  labels.reserve(logits.size());
  for (const auto& l : logits) labels.push_back(argmax_label(l));
  return labels;
}

int SeqModel::predict_target(const Example& example, const EmbeddingStore& store) const {
  if (!example.target_index) throw DomainError("example '" + example.id + "' has no target index");
  Rng unused(0);
  const auto logits = forward(example, store, Mode::eval, unused);
  return seq_extract_verb_label(logits, *example.target_index);
}

// ---------------------------------------------------------------------------
// CLS

ClsModel::ClsModel(ModelConfig config, std::uint64_t seed) : Model(std::move(config)) {
  this->config().validate();
  if (kind() != ModelKind::cls) throw ConfigError("ClsModel built from a non-cls config");
  Rng rng(seed);
  const auto& c = this->config();
  index_embedding_ = make_index_embedding(c, rng);
  encoder_ = BiLstm(c.lstm_input_dim(), c.hidden_dim, c.init, rng);
  attention_ = Attention(2 * c.hidden_dim, c.init, rng);
  head_ = FeedForward(2 * c.hidden_dim, c.ff_hidden_dim, c.init, rng);
}

ClsOutput ClsModel::forward(const Example& example, const EmbeddingStore& store, Mode mode,
                            Rng& rng) const {
  if (!example.target_index) throw DomainError("example '" + example.id + "' has no target index");
  if (*example.target_index >= example.size()) {
    throw DomainError("example '" + example.id + "' target index out of range");
  }
  check_store(store);
  auto inputs = store.static_inputs(example);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto row = i == *example.target_index ? kTargetRow : kNonTargetRow;
    inputs[i] = dropout(concat({inputs[i], index_embedding_.lookup(row)}),
                        config().lstm_input_dropout, mode, rng);
  }
  const auto states = encoder_.run(inputs);
  auto pooled = attention_.pool(states);
  Tensor logits = head_.forward(dropout(pooled.pooled, config().ff_input_dropout, mode, rng));
  return {std::move(logits), std::move(pooled.weights)};
}

std::vector<NamedTensor> ClsModel::named_parameters() const {
  std::vector<NamedTensor> out{{"index_embedding", index_embedding_.table()}};
  for (auto& p : encoder_.named_parameters("encoder.")) out.push_back(std::move(p));
  for (auto& p : attention_.named_parameters("attention.")) out.push_back(std::move(p));
  for (auto& p : head_.named_parameters("head.")) out.push_back(std::move(p));
  return out;
}

Tensor ClsModel::loss(const Example& example, const EmbeddingStore& store, Mode mode,
                      Rng& rng) const {
  return nll_loss(forward(example, store, mode, rng).logits, example.target_label());
}

std::vector<int> ClsModel::predict_tokens(const Example&, const EmbeddingStore&) const {
  throw DomainError("the classification model predicts only the target token");
}

int ClsModel::predict_target(const Example& example, const EmbeddingStore& store) const {
  Rng unused(0);
  return argmax_label(forward(example, store, Mode::eval, unused).logits);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Model> make_model(const ModelConfig& config, std::uint64_t seed) {
  if (config.kind == ModelKind::seq) return std::make_unique<SeqModel>(config, seed);
  return std::make_unique<ClsModel>(config, seed);
}

int seq_extract_verb_label(std::span<const Tensor> token_logits, std::size_t target_index) {
  if (target_index >= token_logits.size()) {
    throw DomainError("target index " + std::to_string(target_index) + " out of range for " +
                      std::to_string(token_logits.size()) + " tokens");
  }
  return argmax_label(token_logits[target_index]);
}

void load_parameters(Model& model, const std::vector<NamedTensor>& values) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& [name, t] : values) by_name[name] = &t;
  for (const auto& [name, param] : model.named_parameters()) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw DimensionError("missing parameter '" + name + "'");
    if (it->second->shape() != param.shape()) {
      throw DimensionError("parameter '" + name + "' has shape " +
                           shape_string(it->second->shape()) + ", model expects " +
                           shape_string(param.shape()));
    }
    auto dst = param.mutable_data();
    auto src = it->second->data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
  if (by_name.size() != model.named_parameters().size()) {
    throw DimensionError("parameter set has entries the model does not use");
  }
}

std::vector<std::vector<double>> snapshot_parameters(const Model& model) {
  std::vector<std::vector<double>> out;
  for (const auto& p : model.parameters()) out.push_back(p.to_vector());
  return out;
}

void restore_parameters(Model& model, const std::vector<std::vector<double>>& snapshot) {
  const auto params = model.parameters();
  if (params.size() != snapshot.size()) throw DimensionError("snapshot does not match model");
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto dst = params[k].mutable_data();
    if (dst.size() != snapshot[k].size()) throw DimensionError("snapshot does not match model");
    std::copy(snapshot[k].begin(), snapshot[k].end(), dst.begin());
  }
}

}  // namespace metaphor
