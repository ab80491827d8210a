#include "metaphor/corpus_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "metaphor/errors.hpp"

namespace metaphor {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::vector<std::string> split_spaces(const std::string& field, const std::string& what,
                                      const std::string& source, std::size_t line) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto end = field.find(' ', start);
    auto piece = field.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (piece.empty()) throw ParseError(source, line, "empty entry in " + what + " field");
    out.push_back(std::move(piece));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string join_spaces(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i];
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

long long parse_integer(const std::string& text, const std::string& what, const std::string& source,
                        std::size_t line) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(source, line, what + " '" + text + "' is not an integer");
  }
  return value;
}

void check_example(const Example& example, const std::string& source, std::size_t line) {
  try {
    validate(example);
  } catch (const DomainError& e) {
    throw ParseError(source, line, e.what());
  }
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line, const std::string& source,
                                          std::size_t line_number) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(source, line_number, "unterminated quoted field");
  return fields;
}

std::vector<Example> read_classification_csv(std::istream& in, const std::string& source) {
  static const std::vector<std::string> kColumns = {"id", "genre", "tokens", "pos", "verb_index",
                                                    "label"};
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  const auto header = split_csv_record(line, source, 1);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(header[i], i);
  for (const auto& name : kColumns) {
    if (!column.count(name)) throw ParseError(source, 1, "missing column '" + name + "'");
  }

  std::vector<Example> examples;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_record(line, source, line_number);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_number,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    const auto field = [&](const std::string& name) -> const std::string& {
      return fields[column.at(name)];
    };

    Example ex;
    ex.id = field("id");
    if (ex.id.empty()) throw ParseError(source, line_number, "empty id");
    if (!field("genre").empty()) ex.genre = field("genre");
    ex.tokens = split_spaces(field("tokens"), "tokens", source, line_number);
    if (ex.tokens.empty()) throw ParseError(source, line_number, "empty tokens field");
    if (!field("pos").empty()) ex.pos = split_spaces(field("pos"), "pos", source, line_number);

    const auto index = parse_integer(field("verb_index"), "verb_index", source, line_number);
    if (index < 0 || static_cast<std::size_t>(index) >= ex.tokens.size()) {
      throw ParseError(source, line_number,
                       "verb_index " + std::to_string(index) + " out of range for " +
                           std::to_string(ex.tokens.size()) + " tokens");
    }
    const auto label = parse_integer(field("label"), "label", source, line_number);
    if (label != kLiteral && label != kMetaphor) {
      throw ParseError(source, line_number, "label " + std::to_string(label) + " is not 0 or 1");
    }
    ex.target_index = static_cast<std::size_t>(index);
    ex.labels.assign(ex.tokens.size(), kLiteral);
    ex.labels[*ex.target_index] = static_cast<int>(label);
    check_example(ex, source, line_number);
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<Example> load_classification_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_classification_csv(in, path.string());
}

void write_classification_csv(std::ostream& out, std::span<const Example> examples) {
  out << "id,genre,tokens,pos,verb_index,label\n";
  for (const auto& ex : examples) {
    if (!ex.target_index) throw DomainError("example '" + ex.id + "' has no target for CSV output");
    out << csv_escape(ex.id) << ',' << csv_escape(ex.genre.value_or("")) << ','
        << csv_escape(join_spaces(ex.tokens)) << ','
        << csv_escape(ex.pos ? join_spaces(*ex.pos) : std::string()) << ',' << *ex.target_index
        << ',' << ex.target_label() << '\n';
  }
}

std::vector<Example> read_sequence_jsonl(std::istream& in, const std::string& source) {
  std::vector<Example> examples;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_number, std::string("invalid JSON: ") + e.what());
    }
    try {
      Example ex;
      ex.id = record.at("id").get<std::string>();
      if (auto it = record.find("genre"); it != record.end() && !it->is_null()) {
        auto genre = it->get<std::string>();
        if (!genre.empty()) ex.genre = std::move(genre);
      }
      ex.tokens = record.at("tokens").get<std::vector<std::string>>();
      if (auto it = record.find("pos"); it != record.end() && !it->is_null()) {
        auto pos = it->get<std::vector<std::string>>();
        if (!pos.empty()) ex.pos = std::move(pos);
      }
      ex.labels = record.at("labels").get<std::vector<int>>();
      if (auto it = record.find("verb_index"); it != record.end() && !it->is_null()) {
        const auto index = it->get<long long>();
        if (index < 0) throw DomainError("negative verb_index");
        ex.target_index = static_cast<std::size_t>(index);
      }
      check_example(ex, source, line_number);
      examples.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw ParseError(source, line_number, e.what());
    } catch (const DomainError& e) {
      throw ParseError(source, line_number, e.what());
    }
  }
  return examples;
}

std::vector<Example> load_sequence_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_sequence_jsonl(in, path.string());
}

void write_sequence_jsonl(std::ostream& out, std::span<const Example> examples) {
  for (const auto& ex : examples) {
    json record = {{"id", ex.id},
                   {"genre", ex.genre.value_or("")},
                   {"tokens", ex.tokens},
                   {"pos", ex.pos.value_or(std::vector<std::string>{})},
                   {"labels", ex.labels}};
    if (ex.target_index) record["verb_index"] = *ex.target_index;
    out << record.dump() << '\n';
  }
}

std::vector<Example> load_corpus(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return load_classification_csv(path);
  return load_sequence_jsonl(path);
}

}  // namespace metaphor
