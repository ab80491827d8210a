#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "metaphor/example.hpp"

namespace metaphor {

// Classification CSV, UTF-8 with header `id,genre,tokens,pos,verb_index,label`.
// tokens/pos are single-space-joined; verb_index is 0-based. Fields follow
// RFC 4180 quoting, so a token such as "," survives a round trip.
std::vector<Example> read_classification_csv(std::istream& in, const std::string& source = "<csv>");
std::vector<Example> load_classification_csv(const std::filesystem::path& path);
void write_classification_csv(std::ostream& out, std::span<const Example> examples);

// Sequence JSONL: {"id", "genre", "tokens", "pos", "labels"} per line. An
// optional "verb_index" marks a classification target; unknown keys are ignored.
std::vector<Example> read_sequence_jsonl(std::istream& in, const std::string& source = "<jsonl>");
std::vector<Example> load_sequence_jsonl(const std::filesystem::path& path);
void write_sequence_jsonl(std::ostream& out, std::span<const Example> examples);

/// Dispatches on extension: `.csv` is classification, anything else JSONL.
std::vector<Example> load_corpus(const std::filesystem::path& path);

/// Splits one CSV record into fields. Exposed for tests.
std::vector<std::string> split_csv_record(const std::string& line, const std::string& source,
                                          std::size_t line_number);

}  // namespace metaphor
