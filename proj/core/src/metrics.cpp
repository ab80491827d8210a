#include "metaphor/metrics.hpp"

#include <algorithm>

#include "metaphor/errors.hpp"

namespace metaphor {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void Confusion::add(int gold, int predicted) {
  if (gold == kMetaphor) {
    (predicted == kMetaphor ? tp : fn) += 1;
  } else {
    (predicted == kMetaphor ? fp : tn) += 1;
  }
}

double Confusion::precision() const { return ratio(tp, tp + fp); }

double Confusion::recall() const { return ratio(tp, tp + fn); }

double Confusion::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double Confusion::accuracy() const { return ratio(tp + tn, total()); }

Confusion& Confusion::operator+=(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

std::string to_string(EvalUnit unit) { return unit == EvalUnit::token ? "token" : "target"; }

EvalUnit eval_unit_for(std::span<const Example> examples) {
  if (examples.empty()) return EvalUnit::token;
  return std::all_of(examples.begin(), examples.end(),
                     [](const Example& e) { return e.target_index.has_value(); })
             ? EvalUnit::target
             : EvalUnit::token;
}

bool EvalReport::has_all_genres() const {
  return std::all_of(kGenres.begin(), kGenres.end(),
                     [&](std::string_view g) { return by_genre.count(std::string(g)) > 0; });
}

void EvalReport::merge(const EvalReport& other) {
  if (other.unit != unit) throw DomainError("cannot merge token-level and target-level reports");
  counts += other.counts;
  for (const auto& [k, c] : other.by_pos) by_pos[k] += c;
  for (const auto& [k, c] : other.by_genre) by_genre[k] += c;
}

EvalReport score(std::span<const Example> examples, std::span<const std::vector<int>> predictions,
                 EvalUnit unit) {
  if (examples.size() != predictions.size()) {
    throw DimensionError(std::to_string(predictions.size()) + " predictions for " +
                         std::to_string(examples.size()) + " examples");
  }
  EvalReport report;
  report.unit = unit;
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const auto& ex = examples[e];
    const auto& pred = predictions[e];
    const auto record = [&](std::size_t i, int predicted) {
      const int gold = ex.labels[i];
      report.counts.add(gold, predicted);
      if (ex.pos) report.by_pos[(*ex.pos)[i]].add(gold, predicted);
      if (ex.genre) report.by_genre[*ex.genre].add(gold, predicted);
    };
    if (unit == EvalUnit::token) {
      if (pred.size() != ex.size()) {
        throw DimensionError("example '" + ex.id + "': " + std::to_string(pred.size()) +
                             " predictions for " + std::to_string(ex.size()) + " tokens");
      }
      for (std::size_t i = 0; i < ex.size(); ++i) record(i, pred[i]);
    } else {
      if (!ex.target_index) throw DomainError("example '" + ex.id + "' has no target index");
      if (pred.size() != 1) {
        throw DimensionError("example '" + ex.id + "': target scoring needs one prediction");
      }
      record(*ex.target_index, pred[0]);
    }
  }
  return report;
}

double macro_f1_by_genre(const EvalReport& report) {
  double total = 0.0;
  for (auto genre : kGenres) {
    const auto it = report.by_genre.find(std::string(genre));
    if (it == report.by_genre.end()) {
      throw DomainError("macro F1 needs all four genres; '" + std::string(genre) + "' is missing");
    }
    total += it->second.f1();
  }
  return total / static_cast<double>(kGenres.size());
}

std::vector<PosRow> pos_breakdown(const EvalReport& report, double min_metaphor_rate) {
  std::vector<PosRow> rows;
  for (const auto& [tag, c] : report.by_pos) {
    PosRow row;
    row.tag = tag;
    row.count = c.total();
    row.metaphor_rate = ratio(c.tp + c.fn, c.total());
    row.precision = c.precision();
    row.recall = c.recall();
    row.f1 = c.f1();
    if (row.metaphor_rate > min_metaphor_rate) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace metaphor
