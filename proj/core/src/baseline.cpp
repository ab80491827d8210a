#include "metaphor/baseline.hpp"

#include <algorithm>
#include <cctype>

namespace metaphor {

std::string baseline_key(const std::string& token) {
  std::string key = token;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return key;
}

LexicalBaseline LexicalBaseline::fit(std::span<const Example> train) {
  LexicalBaseline model;
  const auto count = [&](const std::string& token, int label) {
    auto& c = model.counts_[baseline_key(token)];
    (label == kMetaphor ? c.metaphor : c.literal) += 1;
  };
  for (const auto& ex : train) {
    if (ex.target_index) {
      count(ex.tokens[*ex.target_index], ex.labels[*ex.target_index]);
    } else {
      for (std::size_t i = 0; i < ex.size(); ++i) count(ex.tokens[i], ex.labels[i]);
    }
  }
  return model;
}

WordCounts LexicalBaseline::counts(const std::string& token) const {
  const auto it = counts_.find(baseline_key(token));
  return it == counts_.end() ? WordCounts{} : it->second;
}

int LexicalBaseline::predict(const std::string& token) const {
  const auto c = counts(token);
  return c.metaphor > c.literal ? kMetaphor : kLiteral;
}

}  // namespace metaphor
