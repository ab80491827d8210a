#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "metaphor/embeddings.hpp"
#include "metaphor/layers.hpp"
#include "metaphor/optimizer.hpp"

namespace metaphor {

enum class ModelKind { seq, cls };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::seq;
  std::size_t word_dim = kWordDim;
  std::size_t context_dim = kContextDim;
  std::size_t index_dim = kIndexDim;  // cls only
  std::size_t hidden_dim = 300;       // per LSTM direction
  std::size_t ff_hidden_dim = 100;
  double lstm_input_dropout = 0.3;
  double ff_input_dropout = 0.3;
  InitScheme init = InitScheme::xavier;

  std::size_t lstm_input_dim() const {
    return word_dim + context_dim + (kind == ModelKind::cls ? index_dim : 0);
  }
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainConfig {
  ModelConfig model;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  bool contextual_enabled = true;
  double clip_norm = 5.0;
  double dev_fraction = 0.1;
  // Stop as soon as dev accuracy reaches this value; > 1 disables it.
  double target_dev_accuracy = 2.0;

  ModelKind task() const { return model.kind; }
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Defaults for a task: Adam at 1e-3 for SEQ, SGD at 0.1 for CLS.
TrainConfig default_config(ModelKind task);

/// Returns the config with contextual vectors disabled (zero-vector input).
TrainConfig ablate_contextual(TrainConfig config);
/// Flips the contextual switch; applying it twice restores the input.
TrainConfig toggle_contextual(TrainConfig config);

nlohmann::json to_json(const ModelConfig& config);
nlohmann::json to_json(const TrainConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Reads a plain `key = value` file. `#` starts a comment; blank lines skipped.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Applies one setting by key (e.g. "lr", "hidden_dim", "optimizer").
/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);

}  // namespace metaphor
