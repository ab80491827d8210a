#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "metaphor/baseline.hpp"
#include "metaphor/checkpoint.hpp"
#include "metaphor/config.hpp"
#include "metaphor/corpus_io.hpp"
#include "metaphor/cross_validation.hpp"
#include "metaphor/embeddings.hpp"
#include "metaphor/errors.hpp"
#include "metaphor/random.hpp"
#include "metaphor/report.hpp"
#include "metaphor/splits.hpp"
#include "metaphor/training.hpp"

namespace metaphor::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kDevSplitStream = 3;

// Thrown for bad flag combinations found after parsing; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SharedFlags {
  std::string task;
  std::string embeddings;
  std::string contextual;
  bool no_contextual = false;
  std::string config;
  std::string out;
  std::size_t jobs = 1;
  bool permissive_vectors = false;
};

// Hyperparameter flags are kept as strings and fed through apply_setting, so
// flags and config-file entries share one parser.
struct Override {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr Override kOverrides[] = {
    {"--seed", "seed", "Master random seed"},
    {"--optimizer", "optimizer", "sgd or adam"},
    {"--lr", "lr", "Learning rate"},
    {"--epochs", "epochs", "Maximum epochs"},
    {"--patience", "patience", "Epochs without dev improvement before stopping"},
    {"--dropout", "dropout", "Dropout on LSTM and feedforward inputs"},
    {"--hidden", "hidden_dim", "LSTM hidden size per direction"},
    {"--ff-hidden", "ff_hidden_dim", "Feedforward hidden size"},
    {"--word-dim", "word_dim", "Static word vector dimension"},
    {"--context-dim", "context_dim", "Contextual vector dimension"},
    {"--index-dim", "index_dim", "Target index embedding dimension (cls)"},
    {"--init", "init", "xavier or zeros"},
    {"--clip-norm", "clip_norm", "Global gradient norm clip"},
    {"--dev-fraction", "dev_fraction", "Dev share carved from training data"},
    {"--target-dev-accuracy", "target_dev_accuracy", "Stop once dev accuracy reaches this"},
};

struct ConfigFlags {
  SharedFlags shared;
  std::vector<std::pair<const Override*, std::string>> values;
  std::vector<CLI::Option*> options;
};

void add_io_flags(CLI::App& app, SharedFlags& f) {
  app.add_option("--embeddings", f.embeddings, "Static word vectors (word v1 ... vd per line)")
      ->check(CLI::ExistingFile);
  app.add_option("--contextual", f.contextual, "Contextual vectors JSONL keyed by sentence id")
      ->check(CLI::ExistingFile);
  app.add_flag("--no-contextual", f.no_contextual, "Replace contextual vectors with zeros");
  app.add_flag("--permissive-vectors", f.permissive_vectors,
               "Skip malformed word-vector lines instead of failing");
}

void add_config_flags(CLI::App& app, ConfigFlags& f) {
  app.add_option("--task", f.shared.task, "seq or cls")->check(CLI::IsMember({"seq", "cls"}));
  app.add_option("--config", f.shared.config, "key = value settings file")->check(CLI::ExistingFile);
  app.add_option("--jobs", f.shared.jobs, "Worker threads (cv folds)")->check(CLI::PositiveNumber);
  add_io_flags(app, f.shared);
  f.values.reserve(std::size(kOverrides));
  for (const auto& o : kOverrides) {
    f.values.emplace_back(&o, std::string());
    f.options.push_back(app.add_option(o.flag, f.values.back().second, o.help));
  }
}

// Defaults for the task, then the config file, then explicit flags.
TrainConfig resolve_config(const ConfigFlags& f) {
  TrainConfig config;
  try {
    std::map<std::string, std::string> file;
    if (!f.shared.config.empty()) file = read_key_values(f.shared.config);

    std::string task = "seq";
    if (auto it = file.find("task"); it != file.end()) task = it->second;
    if (!f.shared.task.empty()) task = f.shared.task;

    config = default_config(model_kind_from_string(task));
    for (const auto& [key, value] : file) apply_setting(config, key, value);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      if (f.options[i]->count() > 0) apply_setting(config, f.values[i].first->key, f.values[i].second);
    }
    if (!f.shared.task.empty()) apply_setting(config, "task", f.shared.task);
    if (f.shared.contextual.empty() || f.shared.no_contextual) config = ablate_contextual(config);
    config.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return config;
}

EmbeddingStore build_store(const SharedFlags& f, const ModelConfig& model, bool contextual) {
  WordVectors words;
  words.dim = model.word_dim;
  if (!f.embeddings.empty()) {
    WordVectorOptions options;
    options.dim = model.word_dim;
    options.permissive = f.permissive_vectors;
    words = load_word_vectors(f.embeddings, options);
  }
  ContextualVectors ctx;
  if (contextual) ctx = load_contextual(f.contextual, model.context_dim);
  return EmbeddingStore(std::move(words), std::move(ctx), model.context_dim, contextual);
}

json inputs_json(const SharedFlags& f, std::initializer_list<std::pair<const char*, std::string>> extra) {
  json j = json::object();
  for (const auto& [key, value] : extra) j[key] = value.empty() ? json() : json(value);
  j["embeddings"] = f.embeddings.empty() ? json() : json(f.embeddings);
  j["contextual"] = f.contextual.empty() || f.no_contextual ? json() : json(f.contextual);
  return j;
}

std::vector<Example> load_nonempty(const std::string& path, const char* what) {
  auto examples = load_corpus(path);
  if (examples.empty()) throw DomainError(std::string(what) + " set " + path + " has no examples");
  return examples;
}

std::string with_suffix(const std::string& base, const char* suffix) { return base + suffix; }

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  ConfigFlags flags;
  std::string data;
  std::string dev;
  std::string history;
  std::string report;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto config = resolve_config(a.flags);
  const auto& shared = a.flags.shared;
  const auto store = build_store(shared, config.model, config.contextual_enabled);

  auto examples = load_nonempty(a.data, "training");
  std::vector<Example> train_set, dev_set;
  if (a.dev.empty()) {
    auto split = dev_split(examples, config.dev_fraction, derive_seed(config.seed, kDevSplitStream));
    train_set = std::move(split.train);
    dev_set = std::move(split.dev);
  } else {
    train_set = std::move(examples);
    dev_set = load_nonempty(a.dev, "dev");
  }

  auto model = make_model(config.model, model_seed(config));
  const auto history = train(*model, store, train_set, dev_set, config);
  const auto dev_report = evaluate(*model, store, dev_set, eval_unit_for(dev_set));

  save_checkpoint(shared.out, *model, config);
  {
    const auto path = a.history.empty() ? with_suffix(shared.out, ".history.csv") : a.history;
    std::ofstream csv(path, std::ios::trunc);
    if (!csv) throw Error("cannot write " + path);
    write_history_csv(csv, history);
  }
  json report = {{"command", "train"},
                 {"config", to_json(config)},
                 {"seed", config.seed},
                 {"inputs", inputs_json(shared, {{"data", a.data}, {"dev", a.dev}})},
                 {"train_size", train_set.size()},
                 {"dev_size", dev_set.size()},
                 {"history", to_json(history)},
                 {"dev", to_json(dev_report)}};
  write_json(a.report.empty() ? with_suffix(shared.out, ".report.json") : a.report, report);

  out << "trained " << to_string(config.task()) << " model for " << history.epochs.size()
      << " epochs (best " << history.best_epoch << ", " << history.stop_reason << ")\n";
  print_report(out, dev_report, "dev");
  return kExitOk;
}

// ---- eval / predict --------------------------------------------------------

struct ModelArgs {
  SharedFlags shared;
  std::string task;
  std::string model;
  std::string data;
};

LoadedCheckpoint load_for_inference(const ModelArgs& a, std::optional<EmbeddingStore>& store,
                                    std::ostream& err) {
  auto loaded = load_checkpoint(a.model);
  if (!a.task.empty() && model_kind_from_string(a.task) != loaded.config.task()) {
    throw ConfigError("--task " + a.task + " does not match the checkpoint's " +
                      to_string(loaded.config.task()) + " model");
  }
  const bool contextual = !a.shared.contextual.empty() && !a.shared.no_contextual;
  if (loaded.config.contextual_enabled && !contextual) {
    err << "note: model was trained with contextual vectors; evaluating with zeros\n";
  }
  loaded.config.contextual_enabled = contextual;
  store.emplace(build_store(a.shared, loaded.config.model, contextual));
  loaded.model->check_store(*store);
  return loaded;
}

int cmd_eval(const ModelArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<EmbeddingStore> store;
  const auto loaded = load_for_inference(a, store, err);
  const auto examples = load_nonempty(a.data, "evaluation");
  const auto report = evaluate(*loaded.model, *store, examples, eval_unit_for(examples));

  print_report(out, report, "eval");
  if (!a.shared.out.empty()) {
    write_json(a.shared.out, {{"command", "eval"},
                              {"config", to_json(loaded.config)},
                              {"seed", loaded.config.seed},
                              {"inputs", inputs_json(a.shared, {{"model", a.model}, {"data", a.data}})},
                              {"report", to_json(report)}});
  }
  return kExitOk;
}

// Records to predict on, each paired with the JSON object echoed to the output.
struct PredictInput {
  std::vector<Example> examples;
  std::vector<nlohmann::ordered_json> records;
};

PredictInput read_predict_input(const std::string& path) {
  PredictInput input;
  if (fs::path(path).extension() == ".csv") {
    input.examples = load_classification_csv(path);
    for (const auto& ex : input.examples) {
      std::ostringstream line;
      write_sequence_jsonl(line, std::span<const Example>(&ex, 1));
      input.records.push_back(nlohmann::ordered_json::parse(line.str()));
    }
    return input;
  }
  // Labels are optional here: missing ones are filled with zeros for parsing
  // and left out of the echoed record.
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open");
  std::ostringstream normalized;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      normalized << '\n';
      continue;
    }
    nlohmann::ordered_json record;
    try {
      record = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_number, e.what());
    }
    auto parsed = record;
    if (parsed.is_object() && !parsed.contains("labels") && parsed.contains("tokens") &&
        parsed["tokens"].is_array()) {
      parsed["labels"] = std::vector<int>(parsed["tokens"].size(), 0);
    }
    normalized << parsed.dump() << '\n';
    input.records.push_back(std::move(record));
  }
  std::istringstream reread(normalized.str());
  input.examples = read_sequence_jsonl(reread, path);
  return input;
}

int cmd_predict(const ModelArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<EmbeddingStore> store;
  const auto loaded = load_for_inference(a, store, err);
  auto input = read_predict_input(a.data);

  std::ofstream file(a.shared.out, std::ios::trunc);
  if (!file) throw Error("cannot write " + a.shared.out);
  const auto& model = *loaded.model;
  for (std::size_t i = 0; i < input.examples.size(); ++i) {
    const auto& ex = input.examples[i];
    auto& record = input.records[i];
    if (model.kind() == ModelKind::seq) {
      const auto labels = model.predict_tokens(ex, *store);
      record["pred_labels"] = labels;
      if (ex.has_target()) record["pred"] = labels[*ex.target_index];
    } else {
      record["pred"] = model.predict_target(ex, *store);
    }
    file << record.dump() << '\n';
  }
  if (!file) throw Error("failed writing " + a.shared.out);
  out << "wrote " << input.examples.size() << " predictions to " << a.shared.out << '\n';
  return kExitOk;
}

// ---- baseline ----------------------------------------------------------------

struct BaselineArgs {
  SharedFlags shared;
  std::string data;
  std::string test;
};

int cmd_baseline(const BaselineArgs& a, std::ostream& out) {
  const auto train_set = load_nonempty(a.data, "training");
  const auto test_set = load_nonempty(a.test, "test");
  const auto baseline = LexicalBaseline::fit(train_set);
  const auto report = evaluate(baseline, test_set, eval_unit_for(test_set));

  print_report(out, report, "lexical baseline");
  if (!a.shared.out.empty()) {
    write_json(a.shared.out, {{"command", "baseline"},
                              {"inputs", {{"data", a.data}, {"test", a.test}}},
                              {"vocabulary", baseline.table().size()},
                              {"report", to_json(report)}});
  }
  return kExitOk;
}

// ---- cv ----------------------------------------------------------------------

struct CvArgs {
  ConfigFlags flags;
  std::string data;
  std::size_t k = 10;
};

int cmd_cv(const CvArgs& a, std::ostream& out) {
  const auto config = resolve_config(a.flags);
  const auto& shared = a.flags.shared;
  const auto store = build_store(shared, config.model, config.contextual_enabled);
  const auto examples = load_nonempty(a.data, "cross-validation");

  const auto report = run_cv(examples, store, config, a.k, shared.jobs);
  print_cv_report(out, report);
  if (!shared.out.empty()) {
    write_json(shared.out, {{"command", "cv"},
                            {"config", to_json(config)},
                            {"seed", config.seed},
                            {"inputs", inputs_json(shared, {{"data", a.data}})},
                            {"cv", to_json(report)}});
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metaphor detection: train, evaluate and cross-validate BiLSTM taggers", "metaphor"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_config_flags(*train_cmd, train_args.flags);
  train_cmd->add_option("--data", train_args.data, "Training corpus (.csv or .jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", train_args.dev, "Dev corpus; default carves one from --data")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.flags.shared.out, "Checkpoint path")->required();
  train_cmd->add_option("--history", train_args.history, "History CSV (default <out>.history.csv)");
  train_cmd->add_option("--report", train_args.report, "Report JSON (default <out>.report.json)");

  ModelArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on labeled data");
  add_io_flags(*eval_cmd, eval_args.shared);
  eval_cmd->add_option("--task", eval_args.task, "Expected model kind")->check(CLI::IsMember({"seq", "cls"}));
  eval_cmd->add_option("--model", eval_args.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_args.data, "Labeled corpus")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_args.shared.out, "Report JSON");

  ModelArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Write per-sentence predictions as JSONL");
  add_io_flags(*predict_cmd, predict_args.shared);
  predict_cmd->add_option("--task", predict_args.task, "Expected model kind")->check(CLI::IsMember({"seq", "cls"}));
  predict_cmd->add_option("--model", predict_args.model, "Checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict_args.data, "Input corpus; labels optional")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_args.shared.out, "Output JSONL")->required();

  BaselineArgs baseline_args;
  auto* baseline_cmd = app.add_subcommand("baseline", "Fit and score the lexical baseline");
  baseline_cmd->add_option("--data", baseline_args.data, "Training corpus")
      ->required()
      ->check(CLI::ExistingFile);
  baseline_cmd->add_option("--test", baseline_args.test, "Test corpus")
      ->required()
      ->check(CLI::ExistingFile);
  baseline_cmd->add_option("--out", baseline_args.shared.out, "Report JSON");

  CvArgs cv_args;
  auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation");
  add_config_flags(*cv_cmd, cv_args.flags);
  cv_cmd->add_option("--data", cv_args.data, "Corpus")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--k", cv_args.k, "Number of folds (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  cv_cmd->add_option("--out", cv_args.flags.shared.out, "Report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_args, out);
    if (*eval_cmd) return cmd_eval(eval_args, out, err);
    if (*predict_cmd) return cmd_predict(predict_args, out, err);
    if (*baseline_cmd) return cmd_baseline(baseline_args, out);
    if (*cv_cmd) return cmd_cv(cv_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace metaphor::cli
