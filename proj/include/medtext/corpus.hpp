#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medtext {

enum class TaskKind { nli, rqe };

TaskKind parse_task(std::string_view name);
std::string_view task_name(TaskKind task);

// Label set in canonical (alphabetical) order:
//   nli -> contradiction, entailment, neutral
//   rqe -> false, true
const std::vector<std::string>& task_labels(TaskKind task);
bool is_task_label(TaskKind task, const std::string& label);

enum class Provenance { original, umls_augmented, paraphrase, qqp };
std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

enum class Side { a, b };
std::string_view side_name(Side s);
Side parse_side(std::string_view name);

// Probability per label; std::map keeps label iteration deterministic.
using Probs = std::map<std::string, double>;

struct LabeledSentencePair {
  std::string id;
  std::optional<std::string> group_id;  // premise identifier for NLI grouping
  std::string text_a;                   // Premise or CHQ
  std::string text_b;                   // Hypothesis or FAQ
  std::optional<std::string> label;
  Provenance provenance = Provenance::original;

  bool operator==(const LabeledSentencePair&) const = default;
};

struct PredictionRecord {
  std::string pair_id;
  std::string model_name;
  Probs probs;

  bool operator==(const PredictionRecord&) const = default;
};

struct GazetteerEntry {
  std::string abbreviation;
  std::string expansion;
};

// Ordered multimap: one abbreviation may appear on several lines; file
// order is preserved and decides lookup precedence.
struct Gazetteer {
  std::vector<GazetteerEntry> entries;
};

struct ConceptAnnotation {
  std::string pair_id;
  Side side = Side::a;
  std::size_t span_start = 0;  // Unicode scalar offsets, half-open
  std::size_t span_end = 0;
  std::string surface;
  std::string canonical_name;
  std::string concept_type;
};

struct AnswerCandidate {
  std::string question_id;
  std::string answer_id;
  std::string text;
  std::string source;
  std::optional<bool> relevance;
  std::optional<std::int64_t> rank_hint;

  bool operator==(const AnswerCandidate&) const = default;
};

struct RankingDatasetStats {
  std::size_t question_count = 0;
  double avg_answer_count = 0.0;
  double avg_answer_length = 0.0;  // in tokens
};

// A hard per-pair label, as written by the constrain and ensemble stages.
struct LabelRecord {
  std::string pair_id;
  std::string label;
  std::optional<std::string> model_name;
};

enum class PairFormat { jsonl, tsv };

// Infers jsonl/tsv from the file extension (.tsv -> tsv, otherwise jsonl).
PairFormat sniff_pair_format(const std::filesystem::path& path);

// Loaders validate record invariants and report the offending line or id.
constexpr double kSimplexTolerance = 1e-6;

void validate_pair(const LabeledSentencePair& pair, TaskKind task);

std::vector<LabeledSentencePair> load_pairs(const std::filesystem::path& path,
                                            TaskKind task, PairFormat format);
std::string pairs_to_jsonl(const std::vector<LabeledSentencePair>& pairs);
void save_pairs(const std::filesystem::path& path,
                const std::vector<LabeledSentencePair>& pairs);

// Probabilities within kSimplexTolerance of the simplex are renormalized;
// anything farther off is rejected.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               TaskKind task);
std::string predictions_to_jsonl(const std::vector<PredictionRecord>& preds);
void save_predictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& preds);

Gazetteer load_gazetteer(const std::filesystem::path& path);

std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& path);
// Cross-validates spans against the referenced pair texts: bounds, surface
// equality and per-(pair, side) non-overlap.
void validate_annotations(const std::vector<ConceptAnnotation>& annotations,
                          const std::vector<LabeledSentencePair>& pairs);
std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& path,
                                                const std::vector<LabeledSentencePair>& pairs);

std::vector<AnswerCandidate> load_answers(const std::filesystem::path& path);
std::string answers_to_jsonl(const std::vector<AnswerCandidate>& answers);
void save_answers(const std::filesystem::path& path,
                  const std::vector<AnswerCandidate>& answers);

RankingDatasetStats dataset_stats(const std::vector<AnswerCandidate>& answers);

std::vector<LabelRecord> load_labels(const std::filesystem::path& path);
std::string labels_to_jsonl(const std::vector<LabelRecord>& labels);
void save_labels(const std::filesystem::path& path,
                 const std::vector<LabelRecord>& labels);

}  // namespace medtext
