#include "medtext/scorer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "medtext/error.hpp"
#include "medtext/io.hpp"
#include "medtext/preprocess.hpp"

namespace medtext {
namespace {

std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool has_alnum(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c) != 0; });
}

std::set<std::string> content_tokens(const std::string& text,
                                     const std::set<std::string>& stopwords) {
  std::set<std::string> out;
  for (const auto& token : tokenize(text)) {
    if (!has_alnum(token.text)) continue;
    std::string low = lower_ascii(token.text);
    if (stopwords.count(low)) continue;
    out.insert(std::move(low));
  }
  return out;
}

void check_temperature(const OverlapScorerConfig& config) {
  if (!(config.temperature > 0.0))
    throw DataError("overlap temperature must be positive");
}

}  // namespace

const std::set<std::string>& OverlapScorerConfig::default_stopwords() {
  // Mirrored in data/stopwords_en.txt; a test keeps the two in sync.
  static const std::set<std::string> words{
      "a",    "an",  "and", "are", "as",   "at",   "be",   "by",   "for",
      "from", "has", "he",  "her", "his",  "in",   "is",   "it",   "its",
      "of",   "on",  "or",  "she", "that", "the",  "this", "to",   "was",
      "were", "will", "with"};
  return words;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::set<std::string> words;
  const std::string content = read_file(path);
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.insert(lower_ascii(std::move(line)));
  }
  return words;
}

Probs overlap_score(const std::string& a, const std::string& b, TaskKind task,
                    const OverlapScorerConfig& config) {
  check_temperature(config);
  const auto set_a = content_tokens(a, config.stopwords);
  const auto set_b = content_tokens(b, config.stopwords);
  std::size_t intersection = 0;
  for (const auto& token : set_a) intersection += set_b.count(token);
  const std::size_t unions = set_a.size() + set_b.size() - intersection;
  const double jaccard =
      unions == 0 ? 1.0 : static_cast<double>(intersection) / static_cast<double>(unions);

  Probs probs;
  if (task == TaskKind::rqe) {
    const double pos = std::pow(jaccard, 1.0 / config.temperature);
    const double neg = std::pow(1.0 - jaccard, 1.0 / config.temperature);
    const double total = pos + neg;
    // pos and neg cannot both be 0: jaccard and 1-jaccard cannot both vanish.
    probs["true"] = pos / total;
    probs["false"] = neg / total;
  } else {
    probs["entailment"] = jaccard;
    probs["neutral"] = (1.0 - jaccard) / 2.0;
    probs["contradiction"] = (1.0 - jaccard) / 2.0;
  }
  return probs;
}

OverlapScorer::OverlapScorer(TaskKind task, OverlapScorerConfig config)
    : task_(task), config_(std::move(config)) {
  check_temperature(config_);
}

Probs OverlapScorer::score(const ScoreRequest& request) const {
  return overlap_score(request.text_a, request.text_b, task_, config_);
}

ExternalScorer::ExternalScorer(TaskKind task,
                               const std::vector<PredictionRecord>& records,
                               std::string model_name)
    : task_(task), name_(std::move(model_name)) {
  if (name_.empty()) {
    std::set<std::string> models;
    for (const auto& rec : records) models.insert(rec.model_name);
    if (models.size() != 1)
      throw DataError("prediction file holds " + std::to_string(models.size()) +
                      " models; pick one with --model");
    name_ = *models.begin();
  }
  for (const auto& rec : records)
    if (rec.model_name == name_) by_pair_.emplace(rec.pair_id, rec.probs);
  if (by_pair_.empty())
    throw DataError("no predictions for model \"" + name_ + "\"");
}

Probs ExternalScorer::score(const ScoreRequest& request) const {
  if (!request.pair_id)
    throw DataError("external scorer \"" + name_ + "\" needs a pair id");
  auto it = by_pair_.find(*request.pair_id);
  if (it == by_pair_.end())
    throw DataError("model \"" + name_ + "\" has no prediction for pair \"" +
                    *request.pair_id + "\"");
  return it->second;
}

}  // namespace medtext
