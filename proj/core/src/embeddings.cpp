#include "metaphor/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>

#include "metaphor/errors.hpp"
#include "metaphor/ops.hpp"

namespace metaphor {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Parses "token f1 ... f_dim" into `out`; returns an error message or "".
std::string parse_vector_line(const std::string& line, std::size_t dim, std::string& word,
                              std::vector<double>& out) {
  const auto first_space = line.find(' ');
  if (first_space == std::string::npos || first_space == 0) return "expected token followed by floats";
  word = line.substr(0, first_space);
  out.clear();
  const char* p = line.data() + first_space;
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    double value = 0.0;
    const auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc()) return "malformed float";
    out.push_back(value);
    p = next;
  }
  if (out.size() != dim) {
    return "expected " + std::to_string(dim) + " floats, got " + std::to_string(out.size());
  }
  return {};
}

}  // namespace

WordVectors read_word_vectors(std::istream& in, const WordVectorOptions& options,
                              const std::string& source, std::size_t* skipped) {
  if (options.dim == 0) throw ConfigError("word vector dim must be positive");
  WordVectors result;
  result.dim = options.dim;
  std::size_t bad_lines = 0;
  std::string line, word;
  std::vector<double> values;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto error = parse_vector_line(line, options.dim, word, values);
    if (!error.empty()) {
      if (!options.permissive) throw ParseError(source, line_number, error);
      ++bad_lines;
      continue;
    }
    if (result.index.count(word)) continue;
    result.index.emplace(word, result.words.size());
    result.words.push_back(word);
    result.values.insert(result.values.end(), values.begin(), values.end());
  }
  if (skipped) *skipped = bad_lines;
  return result;
}

WordVectors load_word_vectors(const std::filesystem::path& path, const WordVectorOptions& options,
                              std::size_t* skipped) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_word_vectors(in, options, path.string(), skipped);
}

ContextualVectors read_contextual(std::istream& in, std::size_t dim, const std::string& source) {
  ContextualVectors result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      auto id = record.at("id").get<std::string>();
      const auto& vectors = record.at("vectors");
      if (!vectors.is_array() || vectors.empty()) {
        throw ParseError(source, line_number, "record '" + id + "' has no vectors");
      }
      ContextRows rows;
      rows.rows = vectors.size();
      rows.dim = dim;
      rows.values.reserve(rows.rows * dim);
      for (std::size_t r = 0; r < vectors.size(); ++r) {
        const auto& row = vectors[r];
        if (!row.is_array() || row.size() != dim) {
          throw ParseError(source, line_number,
                           "record '" + id + "' row " + std::to_string(r) + " has width " +
                               std::to_string(row.is_array() ? row.size() : 0) + ", expected " +
                               std::to_string(dim));
        }
        for (const auto& v : row) rows.values.push_back(v.get<double>());
      }
      if (!result.emplace(id, std::move(rows)).second) {
        throw ParseError(source, line_number, "duplicate id '" + id + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_number, e.what());
    }
  }
  return result;
}

ContextualVectors load_contextual(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_contextual(in, dim, path.string());
}

void write_contextual(std::ostream& out, const std::string& id, const ContextRows& rows) {
  nlohmann::json vectors = nlohmann::json::array();
  for (std::size_t r = 0; r < rows.rows; ++r) {
    vectors.push_back(std::vector<double>(rows.values.begin() + r * rows.dim,
                                          rows.values.begin() + (r + 1) * rows.dim));
  }
  out << nlohmann::json{{"id", id}, {"vectors", vectors}}.dump() << '\n';
}

// ---------------------------------------------------------------------------

EmbeddingStore::EmbeddingStore(WordVectors words, ContextualVectors contextual,
                               std::size_t context_dim, bool contextual_enabled)
    : contextual_(std::make_shared<const ContextualVectors>(std::move(contextual))),
      context_dim_(context_dim),
      contextual_enabled_(contextual_enabled) {
  if (words.dim == 0 || context_dim == 0) throw ConfigError("embedding dims must be positive");
  std::vector<double> table(words.dim, 0.0);
  table.insert(table.end(), words.values.begin(), words.values.end());
  word_table_ = EmbeddingLayer(Tensor::constant({words.size() + 1, words.dim}, std::move(table)),
                               /*trainable=*/false, /*unk_index=*/0);
  vocabulary_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) vocabulary_.emplace(words.words[i], i + 1);
  for (const auto& [id, rows] : *contextual_) {
    if (rows.dim != context_dim_) {
      throw DimensionError("contextual record '" + id + "' has dim " + std::to_string(rows.dim) +
                           ", store expects " + std::to_string(context_dim_));
    }
  }
}

EmbeddingStore EmbeddingStore::empty(std::size_t word_dim, std::size_t context_dim) {
  WordVectors words;
  words.dim = word_dim;
  return EmbeddingStore(std::move(words), {}, context_dim, false);
}

std::size_t EmbeddingStore::word_row(const std::string& token) const {
  if (auto it = vocabulary_.find(token); it != vocabulary_.end()) return it->second;
  if (auto it = vocabulary_.find(lowercase(token)); it != vocabulary_.end()) return it->second;
  return word_table_.unk_index();
}

Tensor EmbeddingStore::word_vector(const std::string& token) const {
  return word_table_.lookup(word_row(token));
}

ContextRows EmbeddingStore::contextual_rows(const Example& example) const {
  if (!contextual_enabled_) {
    return {example.size(), context_dim_, std::vector<double>(example.size() * context_dim_, 0.0)};
  }
  const auto it = contextual_->find(example.id);
  if (it == contextual_->end()) {
    throw AlignmentError("no contextual vectors for sentence '" + example.id + "'");
  }
  if (it->second.rows != example.size()) {
    throw AlignmentError("contextual vectors for sentence '" + example.id + "' have " +
                         std::to_string(it->second.rows) + " rows but the sentence has " +
                         std::to_string(example.size()) + " tokens");
  }
  return it->second;
}

std::vector<Tensor> EmbeddingStore::static_inputs(const Example& example) const {
  const auto context = contextual_rows(example);
  const auto wd = word_dim();
  const auto table = word_table_.table().data();
  std::vector<Tensor> inputs;
  inputs.reserve(example.size());
  for (std::size_t i = 0; i < example.size(); ++i) {
    const auto r = word_row(example.tokens[i]);
    std::vector<double> v(table.begin() + r * wd, table.begin() + (r + 1) * wd);
    v.insert(v.end(), context.values.begin() + i * context_dim_,
             context.values.begin() + (i + 1) * context_dim_);
    inputs.push_back(Tensor::constant({static_dim()}, std::move(v)));
  }
  return inputs;
}

EmbeddingStore EmbeddingStore::with_contextual(bool enabled) const {
  EmbeddingStore copy = *this;
  copy.contextual_enabled_ = enabled;
  return copy;
}

Tensor build_input_vector(const EmbeddingStore& store, const Example& example, std::size_t i,
                          const EmbeddingLayer* index_embedding) {
  if (i >= example.size()) {
    throw LookupError("token index " + std::to_string(i) + " out of range for sentence '" +
                      example.id + "'");
  }
  // TODO: contextual_rows copies the whole sentence matrix; add a single-row accessor
  // if per-token callers ever become hot.
  const auto context = store.contextual_rows(example);
  std::vector<double> v = store.word_vector(example.tokens[i]).to_vector();
  v.insert(v.end(), context.values.begin() + i * store.context_dim(),
           context.values.begin() + (i + 1) * store.context_dim());
  Tensor base = Tensor::constant({store.static_dim()}, std::move(v));
  if (!index_embedding) return base;
  const bool is_target = example.target_index && *example.target_index == i;
  return concat({base, index_embedding->lookup(is_target ? kTargetRow : kNonTargetRow)});
}

}  // namespace metaphor
