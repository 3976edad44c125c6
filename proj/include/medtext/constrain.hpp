#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

struct GroupMember {
  std::string pair_id;
  Probs probs;
};

// The three hypotheses predicted for one premise.
struct PremiseGroup {
  std::string group_id;
  std::vector<GroupMember> members;  // sorted by pair_id
};

struct GroupingResult {
  std::vector<PremiseGroup> groups;     // exactly three members each
  std::vector<PremiseGroup> malformed;  // any other size; reported, not fixed
};

// Joins one model's predictions with the pairs' group ids. Hard errors:
// a pair without group_id, a missing or unmatched prediction, or records
// from more than one model.
GroupingResult group_by_premise(const std::vector<PredictionRecord>& preds,
                                const std::vector<LabeledSentencePair>& pairs);

// Greedy mutually-exclusive assignment: highest P(entailment) takes
// entailment, highest P(contradiction) of the remaining two takes
// contradiction, the last member is neutral. Ties go to the smaller
// pair_id. Always a bijection onto the three labels.
std::map<std::string, std::string> apply_prior(const PremiseGroup& group);

// Highest-probability label; ties go to the alphabetically first label.
std::string argmax_label(const Probs& probs);

struct MalformedGroupNote {
  std::string group_id;
  std::size_t size = 0;
  std::vector<std::string> pair_ids;
};

struct ConstrainReport {
  std::string model_name;
  std::size_t group_count = 0;      // well-formed groups
  std::size_t reassigned_count = 0; // pairs whose label moved off their argmax
  std::vector<MalformedGroupNote> malformed;
};

struct ConstrainResult {
  std::vector<LabelRecord> labels;  // one per input pair, in input order
  ConstrainReport report;
};

// Full pass: well-formed groups get the prior; members of malformed
// groups keep their per-pair argmax label and are listed in the report.
ConstrainResult constrain_predictions(const std::vector<PredictionRecord>& preds,
                                      const std::vector<LabeledSentencePair>& pairs);

std::string report_to_json(const ConstrainReport& report);

}  // namespace medtext
