#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metaphor {

inline constexpr int kLiteral = 0;
inline constexpr int kMetaphor = 1;

/// Genres of the VU Amsterdam corpus; macro-F1 averages over all four.
inline constexpr std::array<std::string_view, 4> kGenres = {"academic", "conversation", "fiction",
                                                            "news"};

bool is_known_genre(std::string_view genre);

/// One annotated sentence. Classification corpora carry a target index and
/// label every other token literal.
struct Example {
  std::string id;
  std::optional<std::string> genre;
  std::vector<std::string> tokens;
  std::optional<std::vector<std::string>> pos;
  std::vector<int> labels;
  std::optional<std::size_t> target_index;

  std::size_t size() const { return tokens.size(); }
  bool has_target() const { return target_index.has_value(); }

  /// Gold label of the target token. Requires a target index.
  int target_label() const;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Throws DomainError when the alignment invariants are broken.
void validate(const Example& example);

/// Example-level label used for stratification: the target label when there
/// is one, otherwise whether any token is metaphorical.
int stratum_label(const Example& example);

}  // namespace metaphor
