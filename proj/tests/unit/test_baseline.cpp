#include <doctest.h>

#include <vector>

#include "metaphor/baseline.hpp"
#include "metaphor/random.hpp"
#include "metaphor/training.hpp"
#include "oracles.hpp"

using namespace metaphor;

namespace {

Example sentence(std::vector<std::string> tokens, std::vector<int> labels) {
  Example ex;
  ex.id = "s";
  ex.tokens = std::move(tokens);
  ex.labels = std::move(labels);
  return ex;
}

}  // namespace

TEST_CASE("majority label per lowercased word, ties literal") {
  const std::vector<Example> train{
      sentence({"Attack", "ideas"}, {1, 0}),
      sentence({"attack", "the", "city"}, {1, 0, 0}),
      sentence({"ATTACK", "ideas"}, {0, 1}),
  };
  const auto b = LexicalBaseline::fit(train);
  CHECK(b.counts("attack") == WordCounts{2, 1});
  CHECK(b.predict("Attack") == 1);
  CHECK(b.predict("ideas") == 0);  // 1 vs 1
  CHECK(b.predict("the") == 0);
  CHECK(b.predict("never-seen") == 0);
  CHECK(b.counts("never-seen") == WordCounts{});
  CHECK(b.table().size() == 4);
  CHECK(baseline_key("MiXeD") == "mixed");
}

TEST_CASE("classification examples count only the target token") {
  auto ex = sentence({"grasp", "the", "idea"}, {1, 0, 0});
  ex.target_index = 0;
  const std::vector<Example> train{ex};
  const auto b = LexicalBaseline::fit(train);
  CHECK(b.table().size() == 1);
  CHECK(b.predict("grasp") == 1);
  CHECK(b.counts("the") == WordCounts{});
}

TEST_CASE("baseline agrees with a counting oracle and ignores order") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    oracle::CorpusSpec spec;
    spec.sentences = 40;
    spec.vocabulary = 15;
    spec.with_target = seed % 2 == 1;
    spec.metaphor_rate = 0.4;
    auto train = oracle::random_corpus(spec, seed);
    const auto fitted = LexicalBaseline::fit(train);
    Rng rng(seed);
    rng.shuffle(std::span<Example>(train));
    const auto refit = LexicalBaseline::fit(train);
    CHECK(fitted.table() == refit.table());
    for (int w = 0; w < 16; ++w) {
      const auto token = "w" + std::to_string(w);
      CHECK(fitted.predict(token) == oracle::baseline_label(train, token));
    }
  }
}

TEST_CASE("train = test recall equals the majority-consistent share of metaphor tokens") {
  oracle::CorpusSpec spec;
  spec.sentences = 80;
  spec.vocabulary = 12;
  spec.metaphor_rate = 0.35;
  const auto data = oracle::random_corpus(spec, 21);
  const auto b = LexicalBaseline::fit(data);
  const auto report = evaluate(b, data, EvalUnit::token);

  std::size_t metaphor_tokens = 0, consistent = 0;
  for (const auto& ex : data) {
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (ex.labels[i] != 1) continue;
      ++metaphor_tokens;
      if (oracle::baseline_label(data, ex.tokens[i]) == 1) ++consistent;
    }
  }
  CHECK(report.recall() == static_cast<double>(consistent) / static_cast<double>(metaphor_tokens));
}

TEST_CASE("baseline predictions at target level") {
  oracle::CorpusSpec spec;
  spec.with_target = true;
  const auto data = oracle::random_corpus(spec, 4);
  const auto b = LexicalBaseline::fit(data);
  const auto preds = predict_all(b, data, EvalUnit::target);
  REQUIRE(preds.size() == data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    REQUIRE(preds[k].size() == 1);
    CHECK(preds[k][0] == b.predict(data[k].tokens[*data[k].target_index]));
  }
}
