#include <doctest.h>

#include <sstream>
#include <string>

#include "metaphor/checkpoint.hpp"
#include "metaphor/errors.hpp"
#include "oracles.hpp"

using namespace metaphor;

namespace {

TrainConfig tiny(ModelKind kind) {
  auto c = default_config(kind);
  c.model.word_dim = 4;
  c.model.context_dim = 2;
  c.model.index_dim = 3;
  c.model.hidden_dim = 3;
  c.model.ff_hidden_dim = 2;
  c.seed = 31;
  return c;
}

std::string save(const Model& m, const TrainConfig& c) {
  std::ostringstream out(std::ios::binary);
  save_checkpoint(out, m, c);
  return out.str();
}

LoadedCheckpoint load(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return load_checkpoint(in);
}

}  // namespace

TEST_CASE("save, load, save is byte-identical") {
  for (auto kind : {ModelKind::seq, ModelKind::cls}) {
    const auto c = tiny(kind);
    const auto model = make_model(c.model, 5);
    const auto first = save(*model, c);
    const auto loaded = load(first);
    CHECK(loaded.config == c);
    CHECK(loaded.model->kind() == kind);
    CHECK(save(*loaded.model, loaded.config) == first);
  }
}

TEST_CASE("a loaded model predicts exactly as the original") {
  const auto c = tiny(ModelKind::seq);
  const auto model = make_model(c.model, 8);
  const auto loaded = load(save(*model, c));
  oracle::CorpusSpec spec;
  spec.vocabulary = 8;
  const auto data = oracle::random_corpus(spec, 2);
  const EmbeddingStore store(oracle::random_vectors(8, 4, 1), {}, 2, false);
  Rng r1(0), r2(0);
  for (const auto& ex : data) {
    CHECK(model->loss(ex, store, Mode::eval, r1).item() == loaded.model->loss(ex, store, Mode::eval, r2).item());
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto c = tiny(ModelKind::cls);
  const auto bytes = save(*make_model(c.model, 1), c);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(load(bad_magic), ParseError);

  auto bad_version = bytes;
  bad_version[8] = 9;
  CHECK_THROWS_AS(load(bad_version), ParseError);

  CHECK_THROWS_AS(load(bytes.substr(0, bytes.size() - 3)), ParseError);
  CHECK_THROWS_AS(load(bytes.substr(0, 20)), ParseError);
  CHECK_THROWS_AS(load(""), ParseError);
  CHECK_THROWS_AS(load_checkpoint(std::filesystem::path("/nonexistent/model.ckpt")), ParseError);
}

TEST_CASE("config must describe the saved model") {
  const auto c = tiny(ModelKind::seq);
  const auto model = make_model(c.model, 1);
  auto other = c;
  other.model.hidden_dim = 4;
  std::ostringstream out;
  CHECK_THROWS_AS(save_checkpoint(out, *model, other), ConfigError);
}
