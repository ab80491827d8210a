#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "metaphor/example.hpp"

namespace metaphor {

struct WordCounts {
  std::size_t metaphor = 0;
  std::size_t literal = 0;

  friend bool operator==(const WordCounts&, const WordCounts&) = default;
};

/// Majority label per word from training annotations, keyed by lowercased
/// surface token. Ties and unseen words are literal.
class LexicalBaseline {
 public:
  /// Counts target tokens for examples with a target index, all tokens otherwise.
  static LexicalBaseline fit(std::span<const Example> train);

  int predict(const std::string& token) const;
  WordCounts counts(const std::string& token) const;
  const std::map<std::string, WordCounts>& table() const { return counts_; }

 private:
  std::map<std::string, WordCounts> counts_;
};

std::string baseline_key(const std::string& token);

}  // namespace metaphor
