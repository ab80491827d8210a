#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "metaphor/cross_validation.hpp"
#include "metaphor/metrics.hpp"
#include "metaphor/training.hpp"

namespace metaphor {

nlohmann::json to_json(const Confusion& counts);
/// Counts, metrics, slices, macro-F1 (when all genres present) and the POS table.
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const History& history);
nlohmann::json to_json(const CvReport& report);

/// epoch,train_loss,dev_f1
void write_history_csv(std::ostream& out, const History& history);

void print_report(std::ostream& out, const EvalReport& report, const std::string& title);
void print_cv_report(std::ostream& out, const CvReport& report);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace metaphor
