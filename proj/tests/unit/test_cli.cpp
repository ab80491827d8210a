#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "cli.hpp"
#include "metaphor/corpus_io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace metaphor;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"metaphor"};
  storage.insert(storage.end(), args);
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Scratch directory holding a small corpus and matching vectors.
struct Workspace {
  fs::path dir;
  std::string seq, cls, vectors, three;

  Workspace() {
    dir = fs::temp_directory_path() / ("metaphor_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    oracle::CorpusSpec spec;
    spec.sentences = 16;
    spec.vocabulary = 12;
    seq = (dir / "seq.jsonl").string();
    {
      std::ofstream out(seq);
      write_sequence_jsonl(out, oracle::random_corpus(spec, 1));
    }
    spec.with_target = true;
    cls = (dir / "cls.csv").string();
    {
      std::ofstream out(cls);
      write_classification_csv(out, oracle::random_corpus(spec, 2));
    }
    spec.sentences = 3;
    spec.with_target = false;
    three = (dir / "three.jsonl").string();
    {
      std::ofstream out(three);
      write_sequence_jsonl(out, oracle::random_corpus(spec, 3));
    }
    vectors = (dir / "vectors.txt").string();
    const auto v = oracle::random_vectors(12, 4, 5);
    std::ofstream out(vectors);
    for (std::size_t w = 0; w < v.size(); ++w) {
      out << v.words[w];
      for (double x : v.vector(w)) out << ' ' << x;
      out << '\n';
    }
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

// Tiny dims so each training run takes a fraction of a second.
Result train(const Workspace& w, const std::string& data, const std::string& task,
             const std::string& out, std::initializer_list<std::string> extra = {}) {
  std::vector<std::string> args{"train", "--task", task, "--data", data, "--dev", data,
                                "--out", out, "--embeddings", w.vectors, "--word-dim", "4",
                                "--context-dim", "2", "--index-dim", "2", "--hidden", "3",
                                "--ff-hidden", "3", "--epochs", "2", "--seed", "7"};
  args.insert(args.end(), extra);
  std::vector<const char*> argv{"metaphor"};
  for (const auto& s : args) argv.push_back(s.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const Workspace w;
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"train", "--out", w.path("m.ckpt")}).code == cli::kExitUsage);
  CHECK(run({"cv", "--data", w.seq, "--k", "1"}).code == cli::kExitUsage);
  CHECK(run({"train", "--data", w.seq, "--out", w.path("m"), "--task", "tagging"}).code == cli::kExitUsage);
  CHECK(run({"train", "--data", w.seq, "--out", w.path("m"), "--lr", "fast"}).code == cli::kExitUsage);
  CHECK(run({"baseline", "--data", w.path("missing.csv"), "--test", w.seq}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("runtime failures exit with 1") {
  const Workspace w;
  const auto empty = w.path("empty.jsonl");
  std::ofstream(empty).close();
  const auto r = run({"baseline", "--data", w.seq, "--test", empty});
  CHECK(r.code == cli::kExitFailure);
  CHECK_FALSE(r.err.empty());

  const auto bad = w.path("bad.jsonl");
  std::ofstream(bad) << "{\"id\": \"x\"\n";
  CHECK(run({"baseline", "--data", bad, "--test", w.seq}).code == cli::kExitFailure);
}

TEST_CASE("train writes a checkpoint, history and report") {
  const Workspace w;
  const auto ckpt = w.path("m.ckpt");
  const auto r = train(w, w.seq, "seq", ckpt);
  REQUIRE(r.code == cli::kExitOk);
  CHECK(fs::exists(ckpt));
  CHECK(slurp(ckpt + ".history.csv").rfind("epoch,train_loss,dev_f1\n", 0) == 0);
  const auto report = nlohmann::json::parse(slurp(ckpt + ".report.json"));
  CHECK(report.at("seed") == 7);
  CHECK(report.at("config").at("model").at("hidden_dim") == 3);
  CHECK(report.at("history").is_object());
  CHECK(r.out.find("trained seq model") != std::string::npos);
}

TEST_CASE("same seed, same bytes") {
  const Workspace w;
  for (const std::string task : {"seq", "cls"}) {
    const auto& data = task == "seq" ? w.seq : w.cls;
    REQUIRE(train(w, data, task, w.path("a.ckpt")).code == 0);
    REQUIRE(train(w, data, task, w.path("b.ckpt")).code == 0);
    CHECK(slurp(w.path("a.ckpt")) == slurp(w.path("b.ckpt")));
    CHECK(slurp(w.path("a.ckpt.history.csv")) == slurp(w.path("b.ckpt.history.csv")));

    for (const auto* name : {"a.json", "b.json"}) {
      REQUIRE(run({"eval", "--model", w.path("a.ckpt"), "--data", data, "--embeddings", w.vectors,
                   "--out", w.path(name)})
                  .code == 0);
    }
    CHECK(slurp(w.path("a.json")) == slurp(w.path("b.json")));
  }
}

TEST_CASE("eval rejects mismatched vectors and tasks") {
  const Workspace w;
  const auto ckpt = w.path("m.ckpt");
  REQUIRE(train(w, w.seq, "seq", ckpt).code == 0);

  const auto wide = w.path("wide.txt");
  std::ofstream(wide) << "w0 1 2 3 4 5\n";
  const auto r = run({"eval", "--model", ckpt, "--data", w.seq, "--embeddings", wide});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("expected 4 floats, got 5") != std::string::npos);

  CHECK(run({"eval", "--model", ckpt, "--data", w.seq, "--task", "cls", "--embeddings", w.vectors}).code ==
        cli::kExitFailure);
}

TEST_CASE("predict writes one record per sentence and feeds back into eval") {
  const Workspace w;
  const auto ckpt = w.path("m.ckpt");
  REQUIRE(train(w, w.seq, "seq", ckpt).code == 0);
  const auto preds = w.path("p.jsonl");
  REQUIRE(run({"predict", "--model", ckpt, "--data", w.three, "--embeddings", w.vectors, "--out", preds}).code ==
          0);

  std::ifstream in(preds);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto record = nlohmann::json::parse(line);
    CHECK(record.at("pred_labels").size() == record.at("tokens").size());
    ++n;
  }
  CHECK(n == 3);
  CHECK(run({"eval", "--model", ckpt, "--data", preds, "--embeddings", w.vectors}).code == 0);

  // Unlabeled input is accepted.
  const auto unlabeled = w.path("u.jsonl");
  std::ofstream(unlabeled) << R"({"id": "u", "tokens": ["w1", "w2"]})" << '\n';
  REQUIRE(run({"predict", "--model", ckpt, "--data", unlabeled, "--embeddings", w.vectors, "--out", preds})
              .code == 0);
  const auto record = nlohmann::json::parse(slurp(preds));
  CHECK_FALSE(record.contains("labels"));
  CHECK(record.at("pred_labels").size() == 2);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  const Workspace w;
  const auto cfg = w.path("run.cfg");
  std::ofstream(cfg) << "lr = 0.25\nhidden = 5\n";
  const auto ckpt = w.path("m.ckpt");
  REQUIRE(train(w, w.seq, "seq", ckpt, {"--config", cfg, "--lr", "0.5"}).code == 0);
  const auto report = nlohmann::json::parse(slurp(ckpt + ".report.json"));
  const auto& config = report.at("config");
  CHECK(config.at("learning_rate") == 0.5);
  CHECK(config.at("model").at("hidden_dim") == 3);  // flag beats file
  CHECK(config.at("optimizer") == "adam");           // default

  REQUIRE(run({"train", "--data", w.seq, "--out", ckpt, "--embeddings", w.vectors, "--config", cfg,
               "--word-dim", "4", "--epochs", "1"})
              .code == 0);
  const auto second = nlohmann::json::parse(slurp(ckpt + ".report.json"));
  CHECK(second.at("config").at("model").at("hidden_dim") == 5);
  CHECK(second.at("config").at("learning_rate") == 0.25);
}

TEST_CASE("a perfect predictor prints F1 1.000") {
  const Workspace w;
  // Every word is always metaphorical or always literal, so the baseline is perfect.
  const auto data = w.path("perfect.jsonl");
  {
    std::ofstream out(data);
    out << R"({"id": "a", "tokens": ["sun", "rises"], "labels": [0, 1]})" << '\n'
        << R"({"id": "b", "tokens": ["rises", "sun", "sun"], "labels": [1, 0, 0]})" << '\n';
  }
  const auto r = run({"baseline", "--data", data, "--test", data});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("1.000   1.000   1.000   1.000") != std::string::npos);
}

TEST_CASE("cross-validation runs end to end") {
  const Workspace w;
  const auto out = w.path("cv.json");
  const auto r = run({"cv", "--task", "cls", "--data", w.cls, "--k", "3", "--embeddings", w.vectors,
                      "--word-dim", "4", "--context-dim", "2", "--index-dim", "2", "--hidden", "3",
                      "--ff-hidden", "3", "--epochs", "1", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("3-fold cross-validation") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(out));
  CHECK(report.at("cv").is_object());
}
