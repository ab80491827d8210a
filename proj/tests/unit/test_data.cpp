#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "metaphor/corpus_io.hpp"
#include "metaphor/errors.hpp"
#include "metaphor/example.hpp"
#include "oracles.hpp"

using namespace metaphor;

namespace {

std::size_t parse_error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("classification csv parses targets and quoting") {
  std::istringstream in(
      "id,genre,tokens,pos,verb_index,label\n"
      "a1,news,He absorbed the costs,PRON VERB DET NOUN,1,1\n"
      "\"a,2\",,\"Yes , he said\",,3,0\n");
  const auto examples = read_classification_csv(in, "t.csv");
  REQUIRE(examples.size() == 2);
  const auto& a = examples[0];
  CHECK(a.id == "a1");
  CHECK(a.genre == "news");
  CHECK(a.tokens == std::vector<std::string>{"He", "absorbed", "the", "costs"});
  CHECK(a.pos->at(1) == "VERB");
  CHECK(a.target_index == 1u);
  CHECK(a.labels == std::vector<int>{0, 1, 0, 0});
  CHECK(a.target_label() == kMetaphor);

  const auto& b = examples[1];
  CHECK(b.id == "a,2");
  CHECK_FALSE(b.genre.has_value());
  CHECK_FALSE(b.pos.has_value());
  CHECK(b.tokens[1] == ",");
  CHECK(b.target_label() == kLiteral);
}

TEST_CASE("csv columns may come in any order") {
  std::istringstream in("label,verb_index,tokens,id,pos,genre\n0,0,run fast,x,,fiction\n");
  const auto examples = read_classification_csv(in);
  REQUIRE(examples.size() == 1);
  CHECK(examples[0].tokens.size() == 2);
  CHECK(examples[0].genre == "fiction");
}

TEST_CASE("csv errors name the line") {
  const std::string header = "id,genre,tokens,pos,verb_index,label\n";
  auto line_of = [&](const std::string& body) {
    return parse_error_line([&] {
      std::istringstream in(header + body);
      read_classification_csv(in);
    });
  };
  CHECK(line_of("a,news,x y,,0,1\nb,news,x y,,5,1\n") == 3);       // target out of range
  CHECK(line_of("a,news,x y,,0,2\n") == 2);                        // label not binary
  CHECK(line_of("a,news,x y,A,0,1\n") == 2);                       // pos length mismatch
  CHECK(line_of("a,sports,x y,,0,1\n") == 2);                      // unknown genre
  CHECK(line_of("a,news,x y,,one,1\n") == 2);                      // non-integer index
  CHECK(line_of("a,news,\"x y,,0,1\n") == 2);                      // unterminated quote
  CHECK(line_of("a,news,x  y,,0,1\n") == 2);                       // empty token
  CHECK(line_of("a,news,x y,,0\n") == 2);                          // short row

  std::istringstream missing("id,tokens,verb_index\n");
  CHECK_THROWS_AS(read_classification_csv(missing), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_classification_csv(empty), ParseError);
}

TEST_CASE("csv round trip preserves examples") {
  oracle::CorpusSpec spec;
  spec.sentences = 30;
  spec.with_target = true;
  auto corpus = oracle::random_corpus(spec, 4);
  corpus[0].tokens[0] = "\"quoted\",";
  corpus[1].genre.reset();
  corpus[2].pos.reset();
  std::stringstream buffer;
  write_classification_csv(buffer, corpus);
  const auto back = read_classification_csv(buffer);
  CHECK(back == corpus);
}

TEST_CASE("sequence jsonl parses optional fields") {
  std::istringstream in(
      R"({"id": "s1", "genre": "academic", "tokens": ["a", "b"], "pos": ["X", "Y"], "labels": [0, 1]})"
      "\n\n"
      R"({"id": "s2", "genre": "", "tokens": ["c"], "pos": [], "labels": [1], "verb_index": 0, "extra": 3})"
      "\n");
  const auto examples = read_sequence_jsonl(in);
  REQUIRE(examples.size() == 2);
  CHECK(examples[0].labels == std::vector<int>{0, 1});
  CHECK_FALSE(examples[0].has_target());
  CHECK_FALSE(examples[1].genre.has_value());
  CHECK_FALSE(examples[1].pos.has_value());
  CHECK(examples[1].target_index == 0u);
}

TEST_CASE("jsonl errors name the line") {
  auto line_of = [&](const std::string& body) {
    return parse_error_line([&] {
      std::istringstream in(body);
      read_sequence_jsonl(in);
    });
  };
  const std::string ok = R"({"id": "a", "tokens": ["x"], "labels": [0]})";
  CHECK(line_of(ok + "\n{not json}\n") == 2);
  CHECK(line_of(ok + "\n" + R"({"id": "b", "tokens": ["x", "y"], "labels": [0]})" + "\n") == 2);
  CHECK(line_of(R"({"id": "b", "tokens": ["x"]})") == 1);
  CHECK(line_of(R"({"id": "b", "tokens": [], "labels": []})") == 1);
  CHECK(line_of(R"({"id": "b", "tokens": ["x"], "labels": [0], "verb_index": 1})") == 1);
  CHECK(line_of(R"({"id": "b", "tokens": ["x"], "labels": [0], "verb_index": -1})") == 1);
  CHECK(line_of(R"({"id": "b", "genre": "blog", "tokens": ["x"], "labels": [0]})") == 1);
}

TEST_CASE("jsonl round trip, with and without targets") {
  for (bool with_target : {false, true}) {
    oracle::CorpusSpec spec;
    spec.with_target = with_target;
    auto corpus = oracle::random_corpus(spec, 9);
    corpus[3].genre.reset();
    corpus[4].tokens[1] = "caf\xc3\xa9 \"x\"";
    std::stringstream buffer;
    write_sequence_jsonl(buffer, corpus);
    CHECK(read_sequence_jsonl(buffer) == corpus);
  }
}

TEST_CASE("csv and jsonl agree on classification data") {
  oracle::CorpusSpec spec;
  spec.with_target = true;
  const auto corpus = oracle::random_corpus(spec, 12);
  std::stringstream csv, jsonl;
  write_classification_csv(csv, corpus);
  write_sequence_jsonl(jsonl, corpus);
  CHECK(read_classification_csv(csv) == read_sequence_jsonl(jsonl));
}

TEST_CASE("validate enforces alignment") {
  Example ex{"e", "news", {"a", "b"}, std::vector<std::string>{"X", "Y"}, {0, 1}, 1};
  CHECK_NOTHROW(validate(ex));
  auto bad = ex;
  bad.labels = {0};
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ex;
  bad.pos = std::vector<std::string>{"X"};
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ex;
  bad.target_index = 2;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ex;
  bad.genre = "poetry";
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ex;
  bad.target_index.reset();
  CHECK_THROWS_AS(bad.target_label(), DomainError);
  CHECK(stratum_label(ex) == 1);
  bad.labels = {0, 0};
  CHECK(stratum_label(bad) == 0);
}

TEST_CASE("load_corpus dispatches on extension and reports missing files") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/file.csv"), ParseError);
  CHECK_THROWS_AS(load_corpus("/nonexistent/file.jsonl"), ParseError);
}

TEST_CASE("split_csv_record handles doubled quotes and trailing empties") {
  CHECK(split_csv_record(R"(a,"b ""c""",,d,)", "s", 1) ==
        std::vector<std::string>{"a", "b \"c\"", "", "d", ""});
  CHECK(split_csv_record("", "s", 1) == std::vector<std::string>{""});
  CHECK_THROWS_AS(split_csv_record("a,\"b", "s", 1), ParseError);
}

TEST_CASE("CRLF line endings read the same as LF") {
  oracle::CorpusSpec spec;
  spec.with_target = true;
  const auto examples = oracle::random_corpus(spec, 4);
  std::ostringstream lf;
  write_classification_csv(lf, examples);
  std::string crlf;
  for (char c : lf.str()) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  std::istringstream a(lf.str()), b(crlf);
  CHECK(read_classification_csv(a, "lf") == read_classification_csv(b, "crlf"));
}
