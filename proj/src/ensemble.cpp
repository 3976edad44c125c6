#include "medtext/ensemble.hpp"

#include <algorithm>

#include "medtext/error.hpp"

namespace medtext {

std::vector<VoteResult> majority_vote(const std::vector<ModelVotes>& predictions,
                                      const std::string& tie_break_model) {
  if (predictions.empty()) throw DataError("majority vote needs at least one model");

  const ModelVotes* breaker = nullptr;
  for (const auto& model : predictions)
    if (model.model_name == tie_break_model) breaker = &model;
  if (!breaker)
    throw DataError("tie-break model \"" + tie_break_model +
                    "\" is not among the voting models");

  const auto& reference = predictions.front();
  for (const auto& model : predictions) {
    if (model.labels.size() != reference.labels.size())
      throw DataError("model \"" + model.model_name + "\" covers " +
                      std::to_string(model.labels.size()) + " pairs but \"" +
                      reference.model_name + "\" covers " +
                      std::to_string(reference.labels.size()));
    for (const auto& [pair_id, label] : model.labels) {
      (void)label;
      if (!reference.labels.count(pair_id))
        throw DataError("model \"" + model.model_name + "\" predicts pair \"" +
                        pair_id + "\" that \"" + reference.model_name +
                        "\" does not");
    }
  }

  std::vector<VoteResult> results;
  results.reserve(reference.labels.size());
  for (const auto& [pair_id, ref_label] : reference.labels) {
    (void)ref_label;
    VoteResult result;
    result.pair_id = pair_id;
    for (const auto& model : predictions)
      ++result.votes[model.labels.at(pair_id)];

    std::size_t top = 0;
    for (const auto& [label, count] : result.votes) {
      (void)label;
      top = std::max(top, count);
    }
    std::vector<std::string> tied;
    for (const auto& [label, count] : result.votes)
      if (count == top) tied.push_back(label);  // map order: already sorted

    if (tied.size() == 1) {
      result.label = tied.front();
    } else {
      result.tie_broken = true;
      const std::string& preferred = breaker->labels.at(pair_id);
      if (std::find(tied.begin(), tied.end(), preferred) != tied.end())
        result.label = preferred;
      else
        result.label = tied.front();
    }
    results.push_back(std::move(result));
  }
  return results;  // map iteration already sorted by pair_id
}

std::vector<LabelRecord> vote_results_to_labels(const std::vector<VoteResult>& results,
                                                const std::string& model_name) {
  std::vector<LabelRecord> labels;
  labels.reserve(results.size());
  for (const auto& result : results)
    labels.push_back({result.pair_id, result.label, model_name});
  return labels;
}

}  // namespace medtext
