#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "metaphor/example.hpp"
#include "metaphor/layers.hpp"

namespace metaphor {

inline constexpr std::size_t kWordDim = 300;
inline constexpr std::size_t kContextDim = 1024;
inline constexpr std::size_t kIndexDim = 50;

/// Pre-trained static vectors in load order. Duplicate words keep the first entry.
struct WordVectors {
  std::size_t dim = kWordDim;
  std::vector<std::string> words;
  std::vector<double> values;  // words.size() x dim, row-major
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return words.size(); }
  std::span<const double> vector(std::size_t row) const {
    return {values.data() + row * dim, dim};
  }
};

struct WordVectorOptions {
  std::size_t dim = kWordDim;
  // Skip malformed lines (reported through `skipped`) instead of failing.
  bool permissive = false;
};

WordVectors read_word_vectors(std::istream& in, const WordVectorOptions& options,
                              const std::string& source = "<vectors>",
                              std::size_t* skipped = nullptr);
WordVectors load_word_vectors(const std::filesystem::path& path, const WordVectorOptions& options = {},
                              std::size_t* skipped = nullptr);

/// Per-token contextual vectors of one sentence.
struct ContextRows {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;
};

using ContextualVectors = std::unordered_map<std::string, ContextRows>;

ContextualVectors read_contextual(std::istream& in, std::size_t dim = kContextDim,
                                  const std::string& source = "<contextual>");
ContextualVectors load_contextual(const std::filesystem::path& path, std::size_t dim = kContextDim);
void write_contextual(std::ostream& out, const std::string& id, const ContextRows& rows);

/// Word vectors (frozen, OOV -> zeros) plus contextual rows keyed by sentence
/// id. Immutable after construction.
class EmbeddingStore {
 public:
  EmbeddingStore(WordVectors words, ContextualVectors contextual, std::size_t context_dim,
                 bool contextual_enabled);

  /// Store with no pre-trained vectors: every word maps to zeros.
  static EmbeddingStore empty(std::size_t word_dim, std::size_t context_dim);

  std::size_t word_dim() const { return word_table_.dim(); }
  std::size_t context_dim() const { return context_dim_; }
  std::size_t static_dim() const { return word_dim() + context_dim_; }
  bool contextual_enabled() const { return contextual_enabled_; }
  std::size_t vocabulary_size() const { return word_table_.rows() - 1; }

  /// Exact match, then lowercase match, then the zero unk row.
  std::size_t word_row(const std::string& token) const;
  Tensor word_vector(const std::string& token) const;

  /// Row-count-checked contextual matrix; zeros when disabled.
  ContextRows contextual_rows(const Example& example) const;

  /// [word vector ; contextual row] for each token, as constants of size static_dim().
  std::vector<Tensor> static_inputs(const Example& example) const;

  /// Same store with contextual vectors switched on or off.
  EmbeddingStore with_contextual(bool enabled) const;

  const EmbeddingLayer& word_table() const { return word_table_; }

 private:
  EmbeddingLayer word_table_;  // row 0 is the unk row
  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::shared_ptr<const ContextualVectors> contextual_;
  std::size_t context_dim_;
  bool contextual_enabled_;
};

/// Index-embedding rows.
inline constexpr std::size_t kTargetRow = 0;
inline constexpr std::size_t kNonTargetRow = 1;

/// [w_i ; e_i] or, when `index_embedding` is given, [w_i ; e_i ; n_i] where n_i
/// is the target or non-target row for token i.
Tensor build_input_vector(const EmbeddingStore& store, const Example& example, std::size_t i,
                          const EmbeddingLayer* index_embedding = nullptr);

}  // namespace metaphor
