#pragma once

#include <map>
#include <string>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

struct ModelVotes {
  std::string model_name;
  std::map<std::string, std::string> labels;  // pair_id -> label
};

struct VoteResult {
  std::string pair_id;
  std::string label;
  std::map<std::string, std::size_t> votes;
  bool tie_broken = false;
};

// Per pair, the most-voted label wins. When the top count is shared, the
// tie-break model's label wins if it is among the tied ones, otherwise
// the alphabetically first tied label; either way tie_broken is set.
// All models must cover the same pair ids, and tie_break_model must be
// one of them. Results come back sorted by pair_id.
std::vector<VoteResult> majority_vote(const std::vector<ModelVotes>& predictions,
                                      const std::string& tie_break_model);

std::vector<LabelRecord> vote_results_to_labels(const std::vector<VoteResult>& results,
                                                const std::string& model_name);

}  // namespace medtext
