#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaphor/example.hpp"

namespace metaphor {

/// Confusion counts for the metaphor class. Every ratio with a zero
/// denominator is defined as 0.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  void add(int gold, int predicted);
  std::size_t total() const { return tp + fp + fn + tn; }
  double precision() const;
  double recall() const;
  double f1() const;
  double accuracy() const;

  Confusion& operator+=(const Confusion& other);
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// What one prediction covers: every token, or only the target verb.
enum class EvalUnit { token, target };

std::string to_string(EvalUnit unit);

/// Target when every example has a target index, token otherwise.
EvalUnit eval_unit_for(std::span<const Example> examples);

struct EvalReport {
  EvalUnit unit = EvalUnit::token;
  Confusion counts;
  std::map<std::string, Confusion> by_pos;
  std::map<std::string, Confusion> by_genre;

  double precision() const { return counts.precision(); }
  double recall() const { return counts.recall(); }
  double f1() const { return counts.f1(); }
  double accuracy() const { return counts.accuracy(); }

  bool has_all_genres() const;
  /// Adds counts and slices of `other` (same unit).
  void merge(const EvalReport& other);

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Scores predictions against gold labels. For the token unit predictions[i]
/// holds one label per token; for the target unit it holds exactly one label.
/// Slices are keyed by the token's POS tag and the example's genre.
EvalReport score(std::span<const Example> examples, std::span<const std::vector<int>> predictions,
                 EvalUnit unit);

/// Unweighted mean of the metaphor F1 of the four genres. Throws DomainError
/// when a genre slice is missing.
double macro_f1_by_genre(const EvalReport& report);

struct PosRow {
  std::string tag;
  std::size_t count = 0;
  double metaphor_rate = 0.0;  // gold metaphor share within the slice
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Per-POS rows in tag order, keeping tags whose metaphor rate exceeds
/// `min_metaphor_rate` (pass 0.1 for the >10% filter).
std::vector<PosRow> pos_breakdown(const EvalReport& report, double min_metaphor_rate = -1.0);

}  // namespace metaphor
