#include "medtext/constrain.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "medtext/error.hpp"

namespace medtext {

GroupingResult group_by_premise(const std::vector<PredictionRecord>& preds,
                                const std::vector<LabeledSentencePair>& pairs) {
  std::set<std::string> models;
  for (const auto& rec : preds) models.insert(rec.model_name);
  if (models.size() > 1)
    throw DataError("predictions mix " + std::to_string(models.size()) +
                    " models; pick one with --model");

  std::unordered_map<std::string, const PredictionRecord*> by_pair;
  for (const auto& rec : preds) {
    if (!by_pair.emplace(rec.pair_id, &rec).second)
      throw DataError("duplicate prediction for pair \"" + rec.pair_id + "\"");
  }

  std::map<std::string, PremiseGroup> grouped;
  std::set<std::string> matched;
  for (const auto& pair : pairs) {
    if (!pair.group_id)
      throw DataError("pair \"" + pair.id + "\" has no group_id");
    auto it = by_pair.find(pair.id);
    if (it == by_pair.end())
      throw DataError("no prediction for pair \"" + pair.id + "\"");
    matched.insert(pair.id);
    PremiseGroup& group = grouped[*pair.group_id];
    group.group_id = *pair.group_id;
    group.members.push_back({pair.id, it->second->probs});
  }
  for (const auto& rec : preds)
    if (!matched.count(rec.pair_id))
      throw DataError("prediction for unknown pair \"" + rec.pair_id + "\"");

  GroupingResult result;
  for (auto& [group_id, group] : grouped) {
    std::sort(group.members.begin(), group.members.end(),
              [](const GroupMember& x, const GroupMember& y) {
                return x.pair_id < y.pair_id;
              });
    (group.members.size() == 3 ? result.groups : result.malformed)
        .push_back(std::move(group));
  }
  return result;
}

std::map<std::string, std::string> apply_prior(const PremiseGroup& group) {
  if (group.members.size() != 3)
    throw DataError("group \"" + group.group_id + "\" has " +
                    std::to_string(group.members.size()) + " members, expected 3");

  // Members arrive sorted by pair_id, so a strict > keeps ties on the
  // smaller id.
  std::vector<const GroupMember*> remaining;
  for (const auto& member : group.members) remaining.push_back(&member);
  std::sort(remaining.begin(), remaining.end(),
            [](const GroupMember* x, const GroupMember* y) {
              return x->pair_id < y->pair_id;
            });

  auto take_max = [&](const std::string& label) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < remaining.size(); ++i)
      if (remaining[i]->probs.at(label) > remaining[best]->probs.at(label)) best = i;
    const GroupMember* chosen = remaining[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    return chosen;
  };

  std::map<std::string, std::string> assignment;
  assignment[take_max("entailment")->pair_id] = "entailment";
  assignment[take_max("contradiction")->pair_id] = "contradiction";
  assignment[remaining.front()->pair_id] = "neutral";
  return assignment;
}

std::string argmax_label(const Probs& probs) {
  if (probs.empty()) throw DataError("cannot take argmax of empty probabilities");
  auto best = probs.begin();
  for (auto it = std::next(probs.begin()); it != probs.end(); ++it)
    if (it->second > best->second) best = it;  // map order breaks ties alphabetically
  return best->first;
}

ConstrainResult constrain_predictions(const std::vector<PredictionRecord>& preds,
                                      const std::vector<LabeledSentencePair>& pairs) {
  auto grouping = group_by_premise(preds, pairs);

  std::unordered_map<std::string, std::string> label_of;
  for (const auto& group : grouping.groups)
    for (const auto& [pair_id, label] : apply_prior(group))
      label_of[pair_id] = label;

  ConstrainResult result;
  result.report.model_name = preds.empty() ? "" : preds.front().model_name;
  result.report.group_count = grouping.groups.size();
  for (const auto& group : grouping.malformed) {
    MalformedGroupNote note;
    note.group_id = group.group_id;
    note.size = group.members.size();
    for (const auto& member : group.members) {
      note.pair_ids.push_back(member.pair_id);
      label_of[member.pair_id] = argmax_label(member.probs);
    }
    result.report.malformed.push_back(std::move(note));
  }

  std::unordered_map<std::string, const Probs*> probs_of;
  for (const auto& rec : preds) probs_of.emplace(rec.pair_id, &rec.probs);
  for (const auto& pair : pairs) {
    LabelRecord rec;
    rec.pair_id = pair.id;
    rec.label = label_of.at(pair.id);
    rec.model_name = result.report.model_name;
    if (rec.label != argmax_label(*probs_of.at(pair.id)))
      ++result.report.reassigned_count;
    result.labels.push_back(std::move(rec));
  }
  return result;
}

std::string report_to_json(const ConstrainReport& report) {
  nlohmann::json obj;
  obj["model_name"] = report.model_name;
  obj["group_count"] = report.group_count;
  obj["reassigned_count"] = report.reassigned_count;
  obj["malformed"] = nlohmann::json::array();
  for (const auto& note : report.malformed) {
    nlohmann::json entry;
    entry["group_id"] = note.group_id;
    entry["size"] = note.size;
    entry["pair_ids"] = note.pair_ids;
    obj["malformed"].push_back(entry);
  }
  return obj.dump(2) + "\n";
}

}  // namespace medtext
