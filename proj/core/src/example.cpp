#include "metaphor/example.hpp"

#include <algorithm>

#include "metaphor/errors.hpp"

namespace metaphor {

bool is_known_genre(std::string_view genre) {
  return std::find(kGenres.begin(), kGenres.end(), genre) != kGenres.end();
}

int Example::target_label() const {
  if (!target_index) throw DomainError("example '" + id + "' has no target index");
  return labels.at(*target_index);
}

void validate(const Example& example) {
  const auto where = "example '" + example.id + "': ";
  if (example.tokens.empty()) throw DomainError(where + "no tokens");
  if (example.labels.size() != example.tokens.size()) {
    throw DomainError(where + std::to_string(example.tokens.size()) + " tokens but " +
                      std::to_string(example.labels.size()) + " labels");
  }
  if (example.pos && example.pos->size() != example.tokens.size()) {
    throw DomainError(where + std::to_string(example.tokens.size()) + " tokens but " +
                      std::to_string(example.pos->size()) + " POS tags");
  }
  for (int label : example.labels) {
    if (label != kLiteral && label != kMetaphor) {
      throw DomainError(where + "label " + std::to_string(label) + " is not 0 or 1");
    }
  }
  if (example.target_index && *example.target_index >= example.tokens.size()) {
    throw DomainError(where + "target index " + std::to_string(*example.target_index) +
                      " out of range for " + std::to_string(example.tokens.size()) + " tokens");
  }
  if (example.genre && !is_known_genre(*example.genre)) {
    throw DomainError(where + "unknown genre '" + *example.genre + "'");
  }
}

int stratum_label(const Example& example) {
  if (example.target_index) return example.labels[*example.target_index];
  return std::any_of(example.labels.begin(), example.labels.end(),
                     [](int l) { return l == kMetaphor; })
             ? kMetaphor
             : kLiteral;
}

}  // namespace metaphor
