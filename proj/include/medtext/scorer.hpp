#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

struct ScoreRequest {
  std::string text_a;
  std::string text_b;
  // External scorers resolve by pair id; text-based scorers ignore it.
  std::optional<std::string> pair_id;
};

// Maps a sentence pair to a probability per task label. Implementations
// must be deterministic and return a valid distribution.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual const std::string& name() const = 0;
  virtual TaskKind task() const = 0;
  virtual Probs score(const ScoreRequest& request) const = 0;
};

struct OverlapScorerConfig {
  double temperature = 1.0;  // must be > 0
  std::set<std::string> stopwords = default_stopwords();

  static const std::set<std::string>& default_stopwords();
};

std::set<std::string> load_stopwords(const std::filesystem::path& path);

// Lexical-overlap baseline. Let J be the Jaccard overlap of the two
// sides' lowercased non-stopword token sets (punctuation-only tokens
// dropped; both sides empty counts as J = 1).
//   rqe: P(true) = J^(1/t) renormalized against P(false) = (1-J)^(1/t)
//   nli: P(entailment) = J, P(neutral) = P(contradiction) = (1-J)/2
Probs overlap_score(const std::string& a, const std::string& b, TaskKind task,
                    const OverlapScorerConfig& config);

class OverlapScorer : public Scorer {
 public:
  OverlapScorer(TaskKind task, OverlapScorerConfig config);

  const std::string& name() const override { return name_; }
  TaskKind task() const override { return task_; }
  Probs score(const ScoreRequest& request) const override;

 private:
  TaskKind task_;
  OverlapScorerConfig config_;
  std::string name_ = "overlap";
};

// Serves stored model predictions by pair id; the stand-in for models
// that cannot run inside this toolkit.
class ExternalScorer : public Scorer {
 public:
  // Keeps the records whose model_name matches; an empty model_name is
  // allowed when the records all come from a single model.
  ExternalScorer(TaskKind task, const std::vector<PredictionRecord>& records,
                 std::string model_name);

  const std::string& name() const override { return name_; }
  TaskKind task() const override { return task_; }
  Probs score(const ScoreRequest& request) const override;

 private:
  TaskKind task_;
  std::string name_;
  std::unordered_map<std::string, Probs> by_pair_;
};

}  // namespace medtext
