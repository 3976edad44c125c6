#include "medtext/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "medtext/error.hpp"

namespace medtext {
namespace {

double ratio(std::size_t numerator, std::size_t denominator) {
  return denominator == 0 ? 0.0
                          : static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

std::size_t ConfusionMatrix::label_index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DataError("label \"" + label + "\" is not in the matrix");
  return static_cast<std::size_t>(it - labels.begin());
}

ConfusionMatrix confusion(const std::map<std::string, std::string>& gold,
                          const std::map<std::string, std::string>& pred,
                          TaskKind task) {
  if (gold.size() != pred.size())
    throw DataError("gold has " + std::to_string(gold.size()) +
                    " pairs but predictions have " + std::to_string(pred.size()));

  ConfusionMatrix cm;
  cm.labels = task_labels(task);
  cm.counts.assign(cm.labels.size(), std::vector<std::size_t>(cm.labels.size(), 0));
  for (const auto& [pair_id, gold_label] : gold) {
    auto it = pred.find(pair_id);
    if (it == pred.end())
      throw DataError("no prediction for pair \"" + pair_id + "\"");
    if (!is_task_label(task, gold_label))
      throw DataError("pair \"" + pair_id + "\": gold label \"" + gold_label +
                      "\" is not a " + std::string(task_name(task)) + " label");
    if (!is_task_label(task, it->second))
      throw DataError("pair \"" + pair_id + "\": predicted label \"" + it->second +
                      "\" is not a " + std::string(task_name(task)) + " label");
    ++cm.counts[cm.label_index(gold_label)][cm.label_index(it->second)];
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw DataError("cannot compute accuracy of an empty matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

ClassMetrics class_metrics(const ConfusionMatrix& cm, const std::string& positive) {
  const std::size_t k = cm.label_index(positive);
  std::size_t tp = cm.counts[k][k];
  std::size_t gold_total = 0, pred_total = 0;
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    gold_total += cm.counts[k][i];
    pred_total += cm.counts[i][k];
  }
  ClassMetrics m;
  m.precision = ratio(tp, pred_total);
  m.recall = ratio(tp, gold_total);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double f1(const ConfusionMatrix& cm, const std::string& positive) {
  return class_metrics(cm, positive).f1;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.labels.empty()) throw DataError("cannot compute macro F1 of an empty matrix");
  double sum = 0.0;
  for (const auto& label : cm.labels) sum += f1(cm, label);
  return sum / static_cast<double>(cm.labels.size());
}

EvalReport evaluate(const std::map<std::string, std::string>& gold,
                    const std::map<std::string, std::string>& pred, TaskKind task) {
  EvalReport report;
  report.task = task;
  report.matrix = confusion(gold, pred, task);
  report.accuracy = accuracy(report.matrix);
  report.macro_f1 = macro_f1(report.matrix);
  for (const auto& label : report.matrix.labels)
    report.per_class[label] = class_metrics(report.matrix, label);
  return report;
}

std::string report_to_text(const EvalReport& report) {
  std::string out;
  out += "task: " + std::string(task_name(report.task)) + "\n";
  out += "pairs: " + std::to_string(report.matrix.total()) + "\n\n";

  std::size_t width = 9;  // at least "predicted"
  for (const auto& label : report.matrix.labels) width = std::max(width, label.size());
  auto pad = [&](const std::string& s) {
    return s + std::string(width + 2 - s.size(), ' ');
  };
  out += "confusion (rows = gold, columns = predicted):\n";
  out += pad("");
  for (const auto& label : report.matrix.labels) out += pad(label);
  out += "\n";
  for (std::size_t i = 0; i < report.matrix.labels.size(); ++i) {
    out += pad(report.matrix.labels[i]);
    for (std::size_t j = 0; j < report.matrix.labels.size(); ++j)
      out += pad(std::to_string(report.matrix.counts[i][j]));
    out += "\n";
  }
  out += "\n";
  out += "accuracy: " + format_double(report.accuracy) + "\n";
  out += "macro F1: " + format_double(report.macro_f1) + "\n";
  for (const auto& [label, m] : report.per_class) {
    out += label + ": precision " + format_double(m.precision) + ", recall " +
           format_double(m.recall) + ", F1 " + format_double(m.f1) + "\n";
  }
  return out;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json obj;
  obj["task"] = std::string(task_name(report.task));
  obj["pairs"] = report.matrix.total();
  obj["labels"] = report.matrix.labels;
  obj["confusion"] = report.matrix.counts;
  obj["accuracy"] = report.accuracy;
  obj["macro_f1"] = report.macro_f1;
  nlohmann::json per_class;
  for (const auto& [label, m] : report.per_class) {
    nlohmann::json entry;
    entry["precision"] = m.precision;
    entry["recall"] = m.recall;
    entry["f1"] = m.f1;
    per_class[label] = entry;
  }
  obj["per_class"] = per_class;
  return obj.dump(2) + "\n";
}

}  // namespace medtext
