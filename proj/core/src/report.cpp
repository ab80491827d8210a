#include "metaphor/report.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "metaphor/errors.hpp"

namespace metaphor {

namespace {

nlohmann::json slice_map(const std::map<std::string, Confusion>& slices) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, c] : slices) out[key] = to_json(c);
  return out;
}

nlohmann::json stats(const MetricStats& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

void metric_row(std::ostream& out, const std::string& label, const Confusion& c) {
  out << "  " << std::left << std::setw(14) << label << std::right << std::fixed
      << std::setprecision(3) << std::setw(8) << c.precision() << std::setw(8) << c.recall()
      << std::setw(8) << c.f1() << std::setw(8) << c.accuracy() << std::setw(9) << c.total()
      << '\n';
}

}  // namespace

nlohmann::json to_json(const Confusion& c) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"tn", c.tn},
          {"precision", c.precision()},
          {"recall", c.recall()},
          {"f1", c.f1()},
          {"accuracy", c.accuracy()}};
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j = to_json(report.counts);
  j["unit"] = to_string(report.unit);
  j["by_pos"] = slice_map(report.by_pos);
  j["by_genre"] = slice_map(report.by_genre);
  j["macro_f1"] = report.has_all_genres() ? nlohmann::json(macro_f1_by_genre(report)) : nlohmann::json();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : pos_breakdown(report)) {
    rows.push_back({{"tag", row.tag},
                    {"count", row.count},
                    {"metaphor_rate", row.metaphor_rate},
                    {"precision", row.precision},
                    {"recall", row.recall},
                    {"f1", row.f1}});
  }
  j["pos_breakdown"] = std::move(rows);
  return j;
}

nlohmann::json to_json(const History& history) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : history.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"dev_f1", e.dev_f1},
                      {"dev_accuracy", e.dev_accuracy}});
  }
  return {{"epochs", std::move(epochs)},
          {"best_epoch", history.best_epoch},
          {"best_dev_f1", history.best_dev_f1},
          {"stop_reason", history.stop_reason}};
}

nlohmann::json to_json(const CvReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"seed", f.seed},
                     {"train_size", f.train_size},
                     {"dev_size", f.dev_size},
                     {"test_size", f.test_size},
                     {"history", to_json(f.history)},
                     {"report", to_json(f.report)}});
  }
  return {{"k", report.k},
          {"seed", report.seed},
          {"folds", std::move(folds)},
          {"pooled", to_json(report.pooled)},
          {"per_fold",
           {{"precision", stats(report.precision)},
            {"recall", stats(report.recall)},
            {"f1", stats(report.f1)},
            {"accuracy", stats(report.accuracy)}}}};
}

void write_history_csv(std::ostream& out, const History& history) {
  out << "epoch,train_loss,dev_f1\n";
  out << std::setprecision(17);
  for (const auto& e : history.epochs) out << e.epoch << ',' << e.train_loss << ',' << e.dev_f1 << '\n';
}

void print_report(std::ostream& out, const EvalReport& report, const std::string& title) {
  out << title << " (" << to_string(report.unit) << "-level)\n";
  out << "  " << std::left << std::setw(14) << "" << std::right << std::setw(8) << "P"
      << std::setw(8) << "R" << std::setw(8) << "F1" << std::setw(8) << "Acc" << std::setw(9) << "N"
      << '\n';
  metric_row(out, "all", report.counts);
  if (!report.by_genre.empty()) {
    out << "  by genre:\n";
    for (const auto& [genre, c] : report.by_genre) metric_row(out, genre, c);
    if (report.has_all_genres()) {
      out << "  genre macro-F1: " << std::fixed << std::setprecision(3)
          << macro_f1_by_genre(report) << '\n';
    }
  }
  const auto rows = pos_breakdown(report, 0.1);
  if (!rows.empty()) {
    out << "  by POS (metaphor rate > 10%):\n";
    for (const auto& row : rows) metric_row(out, row.tag, report.by_pos.at(row.tag));
  }
}

void print_cv_report(std::ostream& out, const CvReport& report) {
  out << report.k << "-fold cross-validation (seed " << report.seed << ")\n";
  for (const auto& f : report.folds) {
    metric_row(out, "fold " + std::to_string(f.fold), f.report.counts);
  }
  print_report(out, report.pooled, "pooled");
  out << std::fixed << std::setprecision(3) << "  per-fold mean +- sd: P " << report.precision.mean
      << " +- " << report.precision.stddev << ", R " << report.recall.mean << " +- "
      << report.recall.stddev << ", F1 " << report.f1.mean << " +- " << report.f1.stddev
      << ", Acc " << report.accuracy.mean << " +- " << report.accuracy.stddev << '\n';
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace metaphor
