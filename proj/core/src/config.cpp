#include "metaphor/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "metaphor/errors.hpp"

namespace metaphor {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("setting '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("setting '" + key + "': expected a boolean, got '" + value + "'");
}

std::string to_string(InitScheme init) { return init == InitScheme::xavier ? "xavier" : "zeros"; }

InitScheme init_from_string(const std::string& name) {
  if (name == "xavier") return InitScheme::xavier;
  if (name == "zeros") return InitScheme::zeros;
  throw ConfigError("unknown init scheme '" + name + "' (expected xavier or zeros)");
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::seq ? "seq" : "cls"; }

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "seq") return ModelKind::seq;
  if (name == "cls") return ModelKind::cls;
  throw ConfigError("unknown task '" + name + "' (expected seq or cls)");
}

void ModelConfig::validate() const {
  if (word_dim == 0 || context_dim == 0 || hidden_dim == 0 || ff_hidden_dim == 0 ||
      (kind == ModelKind::cls && index_dim == 0)) {
    throw ConfigError("model dimensions must be positive");
  }
  for (double rate : {lstm_input_dropout, ff_input_dropout}) {
    if (!(rate >= 0.0 && rate < 1.0)) {
      throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
    }
  }
}

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive, got " + std::to_string(learning_rate));
  }
  if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ConfigError("dev_fraction must lie in (0, 1)");
  }
}

TrainConfig default_config(ModelKind task) {
  TrainConfig config;
  config.model.kind = task;
  if (task == ModelKind::cls) {
    config.optimizer = OptimizerKind::sgd;
    config.learning_rate = 0.1;
  } else {
    config.optimizer = OptimizerKind::adam;
    config.learning_rate = 1e-3;
  }
  return config;
}

TrainConfig ablate_contextual(TrainConfig config) {
  config.contextual_enabled = false;
  return config;
}

TrainConfig toggle_contextual(TrainConfig config) {
  config.contextual_enabled = !config.contextual_enabled;
  return config;
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"task", to_string(c.kind)},
          {"word_dim", c.word_dim},
          {"context_dim", c.context_dim},
          {"index_dim", c.index_dim},
          {"hidden_dim", c.hidden_dim},
          {"ff_hidden_dim", c.ff_hidden_dim},
          {"lstm_input_dropout", c.lstm_input_dropout},
          {"ff_input_dropout", c.ff_input_dropout},
          {"init", to_string(c.init)}};
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"model", to_json(c.model)},
          {"optimizer", to_string(c.optimizer)},
          {"learning_rate", c.learning_rate},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed},
          {"contextual_enabled", c.contextual_enabled},
          {"clip_norm", c.clip_norm},
          {"dev_fraction", c.dev_fraction},
          {"target_dev_accuracy", c.target_dev_accuracy}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  try {
    ModelConfig c;
    c.kind = model_kind_from_string(j.at("task").get<std::string>());
    c.word_dim = j.at("word_dim").get<std::size_t>();
    c.context_dim = j.at("context_dim").get<std::size_t>();
    c.index_dim = j.at("index_dim").get<std::size_t>();
    c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    c.ff_hidden_dim = j.at("ff_hidden_dim").get<std::size_t>();
    c.lstm_input_dropout = j.at("lstm_input_dropout").get<double>();
    c.ff_input_dropout = j.at("ff_input_dropout").get<double>();
    c.init = init_from_string(j.at("init").get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  try {
    TrainConfig c;
    c.model = model_config_from_json(j.at("model"));
    c.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    c.learning_rate = j.at("learning_rate").get<double>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.contextual_enabled = j.at("contextual_enabled").get<bool>();
    c.clip_norm = j.at("clip_norm").get<double>();
    c.dev_fraction = j.at("dev_fraction").get<double>();
    c.target_dev_accuracy = j.at("target_dev_accuracy").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_setting(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "task") c.model.kind = model_kind_from_string(value);
  else if (key == "optimizer") c.optimizer = optimizer_from_string(value);
  else if (key == "lr" || key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
  else if (key == "epochs" || key == "max_epochs") c.max_epochs = parse_number<std::size_t>(key, value);
  else if (key == "patience") c.patience = parse_number<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "contextual") c.contextual_enabled = parse_bool(key, value);
  else if (key == "clip_norm") c.clip_norm = parse_number<double>(key, value);
  else if (key == "dev_fraction") c.dev_fraction = parse_number<double>(key, value);
  else if (key == "target_dev_accuracy") c.target_dev_accuracy = parse_number<double>(key, value);
  else if (key == "word_dim") c.model.word_dim = parse_number<std::size_t>(key, value);
  else if (key == "context_dim") c.model.context_dim = parse_number<std::size_t>(key, value);
  else if (key == "index_dim") c.model.index_dim = parse_number<std::size_t>(key, value);
  else if (key == "hidden" || key == "hidden_dim") c.model.hidden_dim = parse_number<std::size_t>(key, value);
  else if (key == "ff_hidden" || key == "ff_hidden_dim") c.model.ff_hidden_dim = parse_number<std::size_t>(key, value);
  else if (key == "dropout") c.model.lstm_input_dropout = c.model.ff_input_dropout = parse_number<double>(key, value);
  else if (key == "lstm_input_dropout") c.model.lstm_input_dropout = parse_number<double>(key, value);
  else if (key == "ff_input_dropout") c.model.ff_input_dropout = parse_number<double>(key, value);
  else if (key == "init") c.model.init = init_from_string(value);
  else throw ConfigError("unknown setting '" + key + "'");
}

}  // namespace metaphor
