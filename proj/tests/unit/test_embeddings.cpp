#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "metaphor/embeddings.hpp"
#include "metaphor/errors.hpp"
#include "metaphor/layers.hpp"

using namespace metaphor;

namespace {

WordVectors read_vectors(const std::string& text, std::size_t dim, bool permissive = false,
                         std::size_t* skipped = nullptr) {
  std::istringstream in(text);
  return read_word_vectors(in, {dim, permissive}, "<test>", skipped);
}

Example sentence(std::string id, std::vector<std::string> tokens) {
  Example ex;
  ex.id = std::move(id);
  ex.labels.assign(tokens.size(), 0);
  ex.tokens = std::move(tokens);
  return ex;
}

ContextualVectors contextual(const std::string& text, std::size_t dim) {
  std::istringstream in(text);
  return read_contextual(in, dim);
}

}  // namespace

TEST_CASE("word vectors: load order, duplicates keep the first") {
  const auto v = read_vectors("the 1 2\nBank 3 4\nthe 9 9\n\nriver -1 0.5\n", 2);
  CHECK(v.size() == 3);
  CHECK(v.words == std::vector<std::string>{"the", "Bank", "river"});
  CHECK(v.vector(0)[0] == 1.0);
  CHECK(v.vector(2)[1] == 0.5);
}

TEST_CASE("word vectors: malformed lines fail or are skipped") {
  CHECK_THROWS_AS(read_vectors("a 1 2\nb 1\n", 2), ParseError);
  CHECK_THROWS_AS(read_vectors("a 1 x\n", 2), ParseError);
  std::size_t skipped = 0;
  const auto v = read_vectors("a 1 2\nb 1\nc 3 4 5\nd 0 0\n", 2, true, &skipped);
  CHECK(skipped == 2);
  CHECK(v.words == std::vector<std::string>{"a", "d"});
}

TEST_CASE("oov lookup: exact, then lowercase, then zeros") {
  WordVectors words = read_vectors("Bank 1 1\nbank 2 2\nriver 3 3\n", 2);
  const EmbeddingStore store(std::move(words), {}, 3, false);
  CHECK(store.vocabulary_size() == 3);
  CHECK(store.word_vector("Bank").to_vector() == std::vector<double>{1, 1});
  CHECK(store.word_vector("bank").to_vector() == std::vector<double>{2, 2});
  CHECK(store.word_vector("BANK").to_vector() == std::vector<double>{2, 2});
  CHECK(store.word_vector("River").to_vector() == std::vector<double>{3, 3});
  CHECK(store.word_vector("unseen").to_vector() == std::vector<double>{0, 0});
  CHECK(store.word_row("unseen") == 0);
}

TEST_CASE("contextual jsonl round trip and validation") {
  ContextRows rows{2, 3, {0.1, 0.2, 0.3, -1, -2, -3}};
  std::stringstream buffer;
  write_contextual(buffer, "s1", rows);
  const auto back = read_contextual(buffer, 3);
  REQUIRE(back.count("s1") == 1);
  CHECK(back.at("s1").rows == 2);
  CHECK(back.at("s1").values == rows.values);

  CHECK_THROWS_AS(contextual(R"({"id": "a", "vectors": [[1, 2]]})", 3), ParseError);
  CHECK_THROWS_AS(contextual(R"({"id": "a", "vectors": []})", 3), ParseError);
  CHECK_THROWS_AS(
      contextual("{\"id\": \"a\", \"vectors\": [[1]]}\n{\"id\": \"a\", \"vectors\": [[2]]}\n", 1),
      ParseError);
  CHECK_THROWS_AS(contextual(R"({"vectors": [[1]]})", 1), ParseError);
}

TEST_CASE("static inputs concatenate word and contextual rows") {
  auto ctx = contextual(R"({"id": "s", "vectors": [[0.5, 0.25], [-1, 1]]})", 2);
  const EmbeddingStore store(read_vectors("a 1 2 3\n", 3), std::move(ctx), 2, true);
  const auto ex = sentence("s", {"a", "zz"});
  const auto inputs = store.static_inputs(ex);
  REQUIRE(inputs.size() == 2);
  CHECK(inputs[0].to_vector() == std::vector<double>{1, 2, 3, 0.5, 0.25});
  CHECK(inputs[1].to_vector() == std::vector<double>{0, 0, 0, -1, 1});
  CHECK(build_input_vector(store, ex, 1).to_vector() == inputs[1].to_vector());
  CHECK_THROWS_AS(build_input_vector(store, ex, 2), LookupError);

  // Ablation replaces the contextual half with zeros and leaves the word half.
  const auto ablated = store.with_contextual(false).static_inputs(ex);
  CHECK(ablated[0].to_vector() == std::vector<double>{1, 2, 3, 0, 0});
}

TEST_CASE("contextual alignment failures") {
  auto ctx = contextual(R"({"id": "s", "vectors": [[1], [2]]})", 1);
  const EmbeddingStore store(read_vectors("", 2), std::move(ctx), 1, true);
  CHECK_THROWS_AS(store.static_inputs(sentence("s", {"a", "b", "c"})), AlignmentError);
  CHECK_THROWS_AS(store.static_inputs(sentence("other", {"a"})), AlignmentError);
  CHECK_NOTHROW(store.with_contextual(false).static_inputs(sentence("other", {"a"})));

  auto wide = contextual(R"({"id": "s", "vectors": [[1, 2]]})", 2);
  CHECK_THROWS_AS(EmbeddingStore(read_vectors("", 2), std::move(wide), 3, true), DimensionError);
}

TEST_CASE("index embedding marks the target") {
  const EmbeddingStore store = EmbeddingStore::empty(2, 1);
  const EmbeddingLayer index(Tensor::parameter({2, 2}, {1, 1, -1, -1}), true);
  auto ex = sentence("s", {"a", "b", "c"});
  ex.target_index = 1;
  CHECK(build_input_vector(store, ex, 1, &index).to_vector() == std::vector<double>{0, 0, 0, 1, 1});
  CHECK(build_input_vector(store, ex, 2, &index).to_vector() == std::vector<double>{0, 0, 0, -1, -1});
}
