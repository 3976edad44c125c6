#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

struct ConfusionMatrix {
  std::vector<std::string> labels;            // row/column order
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t label_index(const std::string& label) const;  // throws if absent
};

// Gold and predicted labelings over the same pair ids; labels outside
// the task's set are rejected. Matrix axes use the task's label order.
ConfusionMatrix confusion(const std::map<std::string, std::string>& gold,
                          const std::map<std::string, std::string>& pred,
                          TaskKind task);

double accuracy(const ConfusionMatrix& cm);  // trace / total, total > 0

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 ratios are 0 by convention.
ClassMetrics class_metrics(const ConfusionMatrix& cm, const std::string& positive);
double f1(const ConfusionMatrix& cm, const std::string& positive);
double macro_f1(const ConfusionMatrix& cm);

struct EvalReport {
  TaskKind task = TaskKind::nli;
  ConfusionMatrix matrix;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::map<std::string, ClassMetrics> per_class;
};

EvalReport evaluate(const std::map<std::string, std::string>& gold,
                    const std::map<std::string, std::string>& pred, TaskKind task);

std::string report_to_text(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace medtext
