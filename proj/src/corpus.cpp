#include "medtext/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "medtext/error.hpp"
#include "medtext/io.hpp"
#include "medtext/preprocess.hpp"
#include "medtext/unicode.hpp"

namespace medtext {
namespace {

using nlohmann::json;

std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Calls fn(line_no, line) for every non-blank line.
template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  const std::string content = read_file(path);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line_no, line);
  }
}

json parse_json_line(const std::filesystem::path& path, std::size_t line_no,
                     const std::string& line) {
  json value = json::parse(line, nullptr, false);
  if (value.is_discarded())
    throw DataError(where(path, line_no) + ": invalid JSON");
  if (!value.is_object())
    throw DataError(where(path, line_no) + ": expected a JSON object");
  return value;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    throw DataError(context + ": missing field \"" + key + "\"");
  if (!it->is_string())
    throw DataError(context + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw DataError(context + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

std::size_t require_size(const json& obj, const char* key,
                         const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    throw DataError(context + ": missing field \"" + key + "\"");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
    throw DataError(context + ": field \"" + key + "\" must be a non-negative integer");
  return it->get<std::size_t>();
}

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

TaskKind parse_task(std::string_view name) {
  if (name == "nli") return TaskKind::nli;
  if (name == "rqe") return TaskKind::rqe;
  throw DataError("unknown task \"" + std::string(name) + "\" (expected nli or rqe)");
}

std::string_view task_name(TaskKind task) {
  return task == TaskKind::nli ? "nli" : "rqe";
}

const std::vector<std::string>& task_labels(TaskKind task) {
  static const std::vector<std::string> nli{"contradiction", "entailment", "neutral"};
  static const std::vector<std::string> rqe{"false", "true"};
  return task == TaskKind::nli ? nli : rqe;
}

bool is_task_label(TaskKind task, const std::string& label) {
  const auto& labels = task_labels(task);
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::umls_augmented: return "umls_augmented";
    case Provenance::paraphrase: return "paraphrase";
    case Provenance::qqp: return "qqp";
  }
  return "original";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "original") return Provenance::original;
  if (name == "umls_augmented") return Provenance::umls_augmented;
  if (name == "paraphrase") return Provenance::paraphrase;
  if (name == "qqp") return Provenance::qqp;
  throw DataError("unknown provenance \"" + std::string(name) + "\"");
}

std::string_view side_name(Side s) { return s == Side::a ? "a" : "b"; }

Side parse_side(std::string_view name) {
  if (name == "a") return Side::a;
  if (name == "b") return Side::b;
  throw DataError("unknown side \"" + std::string(name) + "\" (expected a or b)");
}

PairFormat sniff_pair_format(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? PairFormat::tsv : PairFormat::jsonl;
}

void validate_pair(const LabeledSentencePair& pair, TaskKind task) {
  if (pair.id.empty()) throw DataError("pair has an empty id");
  const std::string context = "pair \"" + pair.id + "\"";
  if (pair.text_a.empty()) throw DataError(context + ": text_a is empty");
  if (pair.text_b.empty()) throw DataError(context + ": text_b is empty");
  if (pair.group_id && pair.group_id->empty())
    throw DataError(context + ": group_id is empty");
  if (pair.label && !is_task_label(task, *pair.label))
    throw DataError(context + ": label \"" + *pair.label + "\" is not a " +
                    std::string(task_name(task)) + " label");
}

std::vector<LabeledSentencePair> load_pairs(const std::filesystem::path& path,
                                            TaskKind task, PairFormat format) {
  std::vector<LabeledSentencePair> pairs;
  std::unordered_set<std::string> seen;
  auto add = [&](LabeledSentencePair pair, std::size_t line_no) {
    if (pair.label) *pair.label = lower_ascii(*pair.label);
    try {
      validate_pair(pair, task);
    } catch (const DataError& e) {
      throw DataError(where(path, line_no) + ": " + e.what());
    }
    if (!seen.insert(pair.id).second)
      throw DataError(where(path, line_no) + ": duplicate pair id \"" + pair.id + "\"");
    pairs.push_back(std::move(pair));
  };

  if (format == PairFormat::tsv) {
    for_each_line(path, [&](std::size_t line_no, const std::string& line) {
      auto fields = split_tsv(line);
      if (fields.size() != 5)
        throw DataError(where(path, line_no) + ": expected 5 tab-separated fields, got " +
                        std::to_string(fields.size()));
      LabeledSentencePair pair;
      pair.id = fields[0];
      if (!fields[1].empty()) pair.group_id = fields[1];
      pair.text_a = fields[2];
      pair.text_b = fields[3];
      if (!fields[4].empty()) pair.label = fields[4];
      add(std::move(pair), line_no);
    });
  } else {
    for_each_line(path, [&](std::size_t line_no, const std::string& line) {
      json obj = parse_json_line(path, line_no, line);
      const std::string context = where(path, line_no);
      LabeledSentencePair pair;
      pair.id = require_string(obj, "id", context);
      pair.group_id = optional_string(obj, "group_id", context);
      pair.text_a = require_string(obj, "text_a", context);
      pair.text_b = require_string(obj, "text_b", context);
      pair.label = optional_string(obj, "label", context);
      if (auto prov = optional_string(obj, "provenance", context)) {
        try {
          pair.provenance = parse_provenance(*prov);
        } catch (const DataError& e) {
          throw DataError(context + ": " + e.what());
        }
      }
      add(std::move(pair), line_no);
    });
  }
  return pairs;
}

std::string pairs_to_jsonl(const std::vector<LabeledSentencePair>& pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    json obj;
    obj["id"] = pair.id;
    if (pair.group_id) obj["group_id"] = *pair.group_id;
    obj["text_a"] = pair.text_a;
    obj["text_b"] = pair.text_b;
    if (pair.label) obj["label"] = *pair.label;
    obj["provenance"] = std::string(provenance_name(pair.provenance));
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_pairs(const std::filesystem::path& path,
                const std::vector<LabeledSentencePair>& pairs) {
  write_file_atomic(path, pairs_to_jsonl(pairs));
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               TaskKind task) {
  std::vector<PredictionRecord> records;
  std::set<std::pair<std::string, std::string>> seen;  // (model, pair_id)
  const auto& labels = task_labels(task);
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    json obj = parse_json_line(path, line_no, line);
    const std::string context = where(path, line_no);
    PredictionRecord rec;
    rec.pair_id = require_string(obj, "pair_id", context);
    if (rec.pair_id.empty()) throw DataError(context + ": pair_id is empty");
    rec.model_name = require_string(obj, "model_name", context);
    if (rec.model_name.empty()) throw DataError(context + ": model_name is empty");
    auto it = obj.find("probs");
    if (it == obj.end() || !it->is_object())
      throw DataError(context + ": missing \"probs\" object");
    double sum = 0.0;
    for (const auto& label : labels) {
      auto p = it->find(label);
      if (p == it->end() || !p->is_number())
        throw DataError(context + ": probs is missing label \"" + label + "\"");
      double v = p->get<double>();
      if (!(v >= 0.0) || v > 1.0 + kSimplexTolerance)
        throw DataError(context + ": probability for \"" + label +
                        "\" is outside [0, 1]");
      rec.probs[label] = v;
      sum += v;
    }
    if (it->size() != labels.size())
      throw DataError(context + ": probs has labels outside the " +
                      std::string(task_name(task)) + " label set");
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw DataError(context + ": probabilities sum to " + std::to_string(sum) +
                      ", not 1");
    for (auto& [label, v] : rec.probs) v /= sum;
    if (!seen.emplace(rec.model_name, rec.pair_id).second)
      throw DataError(context + ": duplicate prediction for pair \"" + rec.pair_id +
                      "\" by model \"" + rec.model_name + "\"");
    records.push_back(std::move(rec));
  });
  return records;
}

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& preds) {
  std::string out;
  for (const auto& rec : preds) {
    json obj;
    obj["pair_id"] = rec.pair_id;
    obj["model_name"] = rec.model_name;
    json probs;
    for (const auto& [label, v] : rec.probs) probs[label] = v;
    obj["probs"] = probs;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_predictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& preds) {
  write_file_atomic(path, predictions_to_jsonl(preds));
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  Gazetteer gaz;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    auto fields = split_tsv(line);
    if (fields.size() != 2)
      throw DataError(where(path, line_no) +
                      ": expected 2 tab-separated fields (abbreviation, expansion), got " +
                      std::to_string(fields.size()));
    if (fields[0].empty())
      throw DataError(where(path, line_no) + ": empty abbreviation");
    if (fields[1].empty())
      throw DataError(where(path, line_no) + ": empty expansion");
    gaz.entries.push_back({fields[0], fields[1]});
  });
  return gaz;
}

std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& path) {
  std::vector<ConceptAnnotation> annots;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    json obj = parse_json_line(path, line_no, line);
    const std::string context = where(path, line_no);
    ConceptAnnotation a;
    a.pair_id = require_string(obj, "pair_id", context);
    if (a.pair_id.empty()) throw DataError(context + ": pair_id is empty");
    try {
      a.side = parse_side(require_string(obj, "side", context));
    } catch (const DataError& e) {
      throw DataError(context + ": " + e.what());
    }
    a.span_start = require_size(obj, "span_start", context);
    a.span_end = require_size(obj, "span_end", context);
    if (a.span_start >= a.span_end)
      throw DataError(context + ": span_start must be less than span_end");
    a.surface = require_string(obj, "surface", context);
    a.canonical_name = require_string(obj, "canonical_name", context);
    if (a.canonical_name.empty())
      throw DataError(context + ": canonical_name is empty");
    a.concept_type = require_string(obj, "concept_type", context);
    if (a.concept_type.empty()) throw DataError(context + ": concept_type is empty");
    annots.push_back(std::move(a));
  });
  return annots;
}

void validate_annotations(const std::vector<ConceptAnnotation>& annotations,
                          const std::vector<LabeledSentencePair>& pairs) {
  std::unordered_map<std::string, const LabeledSentencePair*> by_id;
  for (const auto& pair : pairs) by_id.emplace(pair.id, &pair);

  // Spans per (pair, side), for the overlap check.
  std::map<std::pair<std::string, Side>, std::vector<std::pair<std::size_t, std::size_t>>> spans;
  for (const auto& a : annotations) {
    const std::string context =
        "annotation on pair \"" + a.pair_id + "\" side " + std::string(side_name(a.side));
    auto it = by_id.find(a.pair_id);
    if (it == by_id.end())
      throw DataError(context + ": no such pair");
    const std::string& text = a.side == Side::a ? it->second->text_a : it->second->text_b;
    const std::size_t length = cp_length(text);
    if (a.span_end > length)
      throw DataError(context + ": span [" + std::to_string(a.span_start) + ", " +
                      std::to_string(a.span_end) + ") exceeds text length " +
                      std::to_string(length));
    const std::string actual = cp_substr(text, a.span_start, a.span_end);
    if (actual != a.surface)
      throw DataError(context + ": surface \"" + a.surface +
                      "\" does not match text span \"" + actual + "\"");
    spans[{a.pair_id, a.side}].emplace_back(a.span_start, a.span_end);
  }
  for (auto& [key, list] : spans) {
    std::sort(list.begin(), list.end());
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].first < list[i - 1].second)
        throw DataError("annotations on pair \"" + key.first + "\" side " +
                        std::string(side_name(key.second)) + " overlap at [" +
                        std::to_string(list[i].first) + ", " +
                        std::to_string(list[i].second) + ")");
    }
  }
}

std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& path,
                                                const std::vector<LabeledSentencePair>& pairs) {
  auto annots = load_annotations(path);
  validate_annotations(annots, pairs);
  return annots;
}

std::vector<AnswerCandidate> load_answers(const std::filesystem::path& path) {
  std::vector<AnswerCandidate> answers;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    json obj = parse_json_line(path, line_no, line);
    const std::string context = where(path, line_no);
    AnswerCandidate a;
    a.question_id = require_string(obj, "question_id", context);
    if (a.question_id.empty()) throw DataError(context + ": question_id is empty");
    a.answer_id = require_string(obj, "answer_id", context);
    if (a.answer_id.empty()) throw DataError(context + ": answer_id is empty");
    a.text = require_string(obj, "text", context);
    if (a.text.empty()) throw DataError(context + ": text is empty");
    a.source = require_string(obj, "source", context);
    if (a.source.empty()) throw DataError(context + ": source is empty");
    if (auto it = obj.find("relevance"); it != obj.end() && !it->is_null()) {
      if (!it->is_boolean())
        throw DataError(context + ": field \"relevance\" must be a boolean");
      a.relevance = it->get<bool>();
    }
    if (auto it = obj.find("rank_hint"); it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer())
        throw DataError(context + ": field \"rank_hint\" must be an integer");
      a.rank_hint = it->get<std::int64_t>();
    }
    if (!seen.emplace(a.question_id, a.answer_id).second)
      throw DataError(context + ": duplicate answer \"" + a.answer_id +
                      "\" for question \"" + a.question_id + "\"");
    answers.push_back(std::move(a));
  });
  return answers;
}

std::string answers_to_jsonl(const std::vector<AnswerCandidate>& answers) {
  std::string out;
  for (const auto& a : answers) {
    json obj;
    obj["question_id"] = a.question_id;
    obj["answer_id"] = a.answer_id;
    obj["text"] = a.text;
    obj["source"] = a.source;
    if (a.relevance) obj["relevance"] = *a.relevance;
    if (a.rank_hint) obj["rank_hint"] = *a.rank_hint;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_answers(const std::filesystem::path& path,
                  const std::vector<AnswerCandidate>& answers) {
  write_file_atomic(path, answers_to_jsonl(answers));
}

RankingDatasetStats dataset_stats(const std::vector<AnswerCandidate>& answers) {
  RankingDatasetStats stats;
  std::set<std::string> questions;
  std::size_t token_total = 0;
  for (const auto& a : answers) {
    questions.insert(a.question_id);
    token_total += tokenize(a.text).size();
  }
  stats.question_count = questions.size();
  if (stats.question_count > 0)
    stats.avg_answer_count =
        static_cast<double>(answers.size()) / static_cast<double>(stats.question_count);
  if (!answers.empty())
    stats.avg_answer_length =
        static_cast<double>(token_total) / static_cast<double>(answers.size());
  return stats;
}

std::vector<LabelRecord> load_labels(const std::filesystem::path& path) {
  std::vector<LabelRecord> labels;
  std::unordered_set<std::string> seen;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    json obj = parse_json_line(path, line_no, line);
    const std::string context = where(path, line_no);
    LabelRecord rec;
    rec.pair_id = require_string(obj, "pair_id", context);
    if (rec.pair_id.empty()) throw DataError(context + ": pair_id is empty");
    rec.label = lower_ascii(require_string(obj, "label", context));
    if (rec.label.empty()) throw DataError(context + ": label is empty");
    rec.model_name = optional_string(obj, "model_name", context);
    if (!seen.insert(rec.pair_id).second)
      throw DataError(context + ": duplicate label for pair \"" + rec.pair_id + "\"");
    labels.push_back(std::move(rec));
  });
  return labels;
}

std::string labels_to_jsonl(const std::vector<LabelRecord>& labels) {
  std::string out;
  for (const auto& rec : labels) {
    json obj;
    obj["pair_id"] = rec.pair_id;
    obj["label"] = rec.label;
    if (rec.model_name) obj["model_name"] = *rec.model_name;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_labels(const std::filesystem::path& path,
                 const std::vector<LabelRecord>& labels) {
  write_file_atomic(path, labels_to_jsonl(labels));
}

}  // namespace medtext
