#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "metaphor/config.hpp"
#include "metaphor/embeddings.hpp"
#include "metaphor/example.hpp"
#include "metaphor/layers.hpp"
#include "metaphor/random.hpp"

namespace metaphor {

/// A trainable predictor over examples. Forward passes build a fresh graph, so
/// one instance may serve concurrent eval-mode calls once training is done.
class Model {
 public:
  explicit Model(ModelConfig config) : config_(std::move(config)) {}
  virtual ~Model() = default;

  const ModelConfig& config() const { return config_; }
  ModelKind kind() const { return config_.kind; }

  virtual std::vector<NamedTensor> named_parameters() const = 0;
  std::vector<Tensor> parameters() const;

  /// Scalar training loss. SEQ: mean token NLL. CLS: NLL of the target label.
  virtual Tensor loss(const Example& example, const EmbeddingStore& store, Mode mode,
                      Rng& rng) const = 0;

  /// Per-token labels. Only SEQ supports this; CLS throws DomainError.
  virtual std::vector<int> predict_tokens(const Example& example,
                                          const EmbeddingStore& store) const = 0;
  virtual int predict_target(const Example& example, const EmbeddingStore& store) const = 0;

  /// Throws DimensionError naming the mismatch when the store's dims differ from the config.
  void check_store(const EmbeddingStore& store) const;

 private:
  ModelConfig config_;
};

/// BiLSTM over [w_i; e_i] with a per-token feedforward head.
class SeqModel final : public Model {
 public:
  SeqModel(ModelConfig config, std::uint64_t seed);

  std::vector<Tensor> forward(const Example& example, const EmbeddingStore& store, Mode mode,
                              Rng& rng) const;

  std::vector<NamedTensor> named_parameters() const override;
  Tensor loss(const Example& example, const EmbeddingStore& store, Mode mode,
              Rng& rng) const override;
  std::vector<int> predict_tokens(const Example& example,
                                  const EmbeddingStore& store) const override;
  int predict_target(const Example& example, const EmbeddingStore& store) const override;

 private:
  BiLstm encoder_;
  FeedForward head_;
};

struct ClsOutput {
  Tensor logits;
  Tensor attention;
};

/// BiLSTM over [w_i; e_i; n_i], attention pooling, feedforward head.
class ClsModel final : public Model {
 public:
  ClsModel(ModelConfig config, std::uint64_t seed);

  ClsOutput forward(const Example& example, const EmbeddingStore& store, Mode mode, Rng& rng) const;

  std::vector<NamedTensor> named_parameters() const override;
  Tensor loss(const Example& example, const EmbeddingStore& store, Mode mode,
              Rng& rng) const override;
  std::vector<int> predict_tokens(const Example& example,
                                  const EmbeddingStore& store) const override;
  int predict_target(const Example& example, const EmbeddingStore& store) const override;

  const EmbeddingLayer& index_embedding() const { return index_embedding_; }

 private:
  EmbeddingLayer index_embedding_;
  BiLstm encoder_;
  Attention attention_;
  FeedForward head_;
};

std::unique_ptr<Model> make_model(const ModelConfig& config, std::uint64_t seed);

/// Reads the target verb's label off full-sentence SEQ logits.
int seq_extract_verb_label(std::span<const Tensor> token_logits, std::size_t target_index);

/// Copies parameter values by name; shapes must match exactly.
void load_parameters(Model& model, const std::vector<NamedTensor>& values);

std::vector<std::vector<double>> snapshot_parameters(const Model& model);
void restore_parameters(Model& model, const std::vector<std::vector<double>>& snapshot);

}  // namespace metaphor
