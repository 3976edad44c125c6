#include "medtext/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "medtext/constrain.hpp"
#include "medtext/ensemble.hpp"
#include "medtext/error.hpp"
#include "medtext/evaluate.hpp"
#include "medtext/io.hpp"
#include "medtext/logging.hpp"
#include "medtext/preprocess.hpp"

namespace medtext {
namespace {

using nlohmann::json;

std::vector<std::string> split_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (parts.size() < 2) {
    std::size_t colon = spec.find(':', pos);
    if (colon == std::string::npos) break;
    parts.push_back(spec.substr(pos, colon - pos));
    pos = colon + 1;
  }
  parts.push_back(spec.substr(pos));
  return parts;
}

// First non-blank line of a JSONL file, parsed; nullopt for empty files.
std::optional<json> first_record(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw DataError(path.string() + ": invalid JSON on the first record");
    return obj;
  }
  return std::nullopt;
}

TaskKind sniff_prediction_task(const std::filesystem::path& path, const json& record) {
  auto it = record.find("probs");
  if (it == record.end() || !it->is_object())
    throw DataError(path.string() + ": record has no \"probs\" object");
  std::set<std::string> keys;
  for (const auto& [key, value] : it->items()) {
    (void)value;
    keys.insert(key);
  }
  for (TaskKind task : {TaskKind::nli, TaskKind::rqe}) {
    const auto& labels = task_labels(task);
    if (keys == std::set<std::string>(labels.begin(), labels.end())) return task;
  }
  throw DataError(path.string() + ": probs labels fit neither nli nor rqe");
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

std::unordered_map<std::string, std::vector<AnswerCandidate>> answers_by_question(
    const std::vector<Question>& questions, const std::vector<AnswerCandidate>& answers) {
  std::set<std::string> known;
  for (const auto& q : questions) known.insert(q.id);
  std::unordered_map<std::string, std::vector<AnswerCandidate>> pools;
  for (const auto& answer : answers) {
    if (!known.count(answer.question_id))
      throw DataError("answer \"" + answer.answer_id + "\" references unknown question \"" +
                      answer.question_id + "\"");
    pools[answer.question_id].push_back(answer);
  }
  return pools;
}

CorpusStats pool_stats(const std::vector<AnswerCandidate>& pool) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(pool.size());
  for (const auto& answer : pool) docs.push_back(bm25_tokens(answer.text));
  return build_stats(docs);
}

}  // namespace

std::unique_ptr<Scorer> build_scorer(const std::string& spec, TaskKind task,
                                     const std::filesystem::path& base_dir) {
  const auto parts = split_spec(spec);
  if (parts[0] == "overlap") {
    OverlapScorerConfig config;
    if (parts.size() > 1 && !parts[1].empty()) {
      try {
        config.temperature = std::stod(parts[1]);
      } catch (const std::exception&) {
        throw DataError("bad overlap temperature in scorer spec \"" + spec + "\"");
      }
    }
    if (parts.size() > 2)
      throw DataError("bad scorer spec \"" + spec + "\"");
    return std::make_unique<OverlapScorer>(task, std::move(config));
  }
  if (parts[0] == "external") {
    if (parts.size() < 2 || parts[1].empty())
      throw DataError("scorer spec \"" + spec + "\" names no prediction file");
    std::filesystem::path path = parts[1];
    if (path.is_relative()) path = base_dir / path;
    const std::string model = parts.size() > 2 ? parts[2] : "";
    return std::make_unique<ExternalScorer>(task, load_predictions(path, task), model);
  }
  throw DataError("unknown scorer kind in spec \"" + spec +
                  "\" (expected overlap or external)");
}

std::optional<std::string> scorer_spec_path(const std::string& spec) {
  const auto parts = split_spec(spec);
  if (parts[0] == "external" && parts.size() > 1 && !parts[1].empty()) return parts[1];
  return std::nullopt;
}

void run_expand(const ExpandCommand& cmd) {
  if (cmd.min_len < 2 || cmd.min_len > cmd.max_len)
    throw DataError("need 2 <= min-len <= max-len");
  const auto pairs = load_pairs(cmd.pairs, cmd.task, sniff_pair_format(cmd.pairs));
  const auto gazetteer = load_gazetteer(cmd.gazetteer);
  const ExpandConfig config{cmd.min_len, cmd.max_len, cmd.rejoin};

  std::vector<LabeledSentencePair> out;
  std::vector<ExpansionTrace> traces;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    auto result = expand(pair, gazetteer, config);
    out.push_back(std::move(result.pair));
    for (auto& trace : result.traces) traces.push_back(std::move(trace));
  }
  save_pairs(cmd.out, out);
  if (cmd.trace_out) write_file_atomic(*cmd.trace_out, traces_to_jsonl(traces));
  log_info("expand: " + std::to_string(pairs.size()) + " pairs, " +
           std::to_string(traces.size()) + " replacements");
}

void run_augment(const AugmentCommand& cmd) {
  const auto pairs = load_pairs(cmd.pairs, cmd.task, sniff_pair_format(cmd.pairs));
  const auto annotations = load_annotations(cmd.annotations, pairs);
  const auto out = augment_dataset(pairs, annotations, cmd.template_text);
  save_pairs(cmd.out, out);
  log_info("augment: " + std::to_string(pairs.size()) + " pairs in, " +
           std::to_string(out.size()) + " out");
}

void run_assemble(const AssembleCommand& cmd) {
  AssembleSources sources;
  const auto load = [](const std::filesystem::path& path) {
    return load_pairs(path, TaskKind::rqe, sniff_pair_format(path));
  };
  if (cmd.train) sources.train = load(*cmd.train);
  if (cmd.validation) sources.validation = load(*cmd.validation);
  if (cmd.annotations) {
    if (!sources.validation)
      throw DataError("--src annotations needs --src validation to check spans against");
    sources.annotations = load_annotations(*cmd.annotations, *sources.validation);
  }
  if (cmd.qqp)
    sources.qqp = looks_like_qqp_tsv(*cmd.qqp) ? load_qqp_tsv(*cmd.qqp) : load(*cmd.qqp);
  if (cmd.paraphrase) sources.paraphrase = load(*cmd.paraphrase);

  AugmentConfig config;
  config.template_text = cmd.template_text;
  config.seed = cmd.seed;
  config.qqp_target_size = cmd.qqp_target;
  const auto dataset = assemble_training_set(parse_variant(cmd.variant), sources, config);
  save_pairs(cmd.out, dataset);
  log_info("assemble: variant " + cmd.variant + ", " + std::to_string(dataset.size()) +
           " pairs");
}

void run_constrain(const ConstrainCommand& cmd) {
  const auto pairs = load_pairs(cmd.pairs, TaskKind::nli, sniff_pair_format(cmd.pairs));
  auto records = load_predictions(cmd.preds, TaskKind::nli);
  if (cmd.model) {
    std::erase_if(records, [&](const PredictionRecord& rec) {
      return rec.model_name != *cmd.model;
    });
    if (records.empty())
      throw DataError("no predictions for model \"" + *cmd.model + "\"");
  }
  const auto result = constrain_predictions(records, pairs);
  save_labels(cmd.out, result.labels);
  if (cmd.report) write_file_atomic(*cmd.report, report_to_json(result.report));
  log_info("constrain: " + std::to_string(result.report.group_count) + " groups, " +
           std::to_string(result.report.malformed.size()) + " malformed, " +
           std::to_string(result.report.reassigned_count) + " labels moved");
}

void run_ensemble(const EnsembleCommand& cmd) {
  if (cmd.preds.empty()) throw DataError("ensemble needs at least one prediction file");
  std::vector<ModelVotes> voters;
  for (const auto& path : cmd.preds) {
    const auto record = first_record(path);
    if (!record) throw DataError(path.string() + ": no records");
    if (record->contains("probs")) {
      const TaskKind task = sniff_prediction_task(path, *record);
      std::map<std::string, ModelVotes> by_model;
      for (const auto& rec : load_predictions(path, task)) {
        ModelVotes& votes = by_model[rec.model_name];
        votes.model_name = rec.model_name;
        votes.labels[rec.pair_id] = argmax_label(rec.probs);
      }
      for (auto& [name, votes] : by_model) {
        (void)name;
        voters.push_back(std::move(votes));
      }
    } else {
      ModelVotes votes;
      std::optional<std::string> common;
      for (const auto& rec : load_labels(path)) {
        if (rec.model_name) {
          if (common && *common != *rec.model_name)
            throw DataError(path.string() + ": mixes model names; split the file");
          common = rec.model_name;
        }
        votes.labels[rec.pair_id] = rec.label;
      }
      if (votes.labels.empty()) throw DataError(path.string() + ": no records");
      votes.model_name = common.value_or(path.stem().string());
      voters.push_back(std::move(votes));
    }
  }
  std::set<std::string> names;
  for (const auto& voter : voters)
    if (!names.insert(voter.model_name).second)
      throw DataError("two voters share the name \"" + voter.model_name + "\"");

  const auto results = majority_vote(voters, cmd.tie_break);
  save_labels(cmd.out, vote_results_to_labels(results, "ensemble"));
  std::size_t ties = 0;
  for (const auto& result : results) ties += result.tie_broken ? 1 : 0;
  log_info("ensemble: " + std::to_string(voters.size()) + " voters, " +
           std::to_string(results.size()) + " pairs, " + std::to_string(ties) +
           " ties broken");
}

void run_rank_train(const RankTrainCommand& cmd) {
  validate_bm25_params(cmd.bm25);
  const auto questions = load_questions(cmd.questions);
  const auto answers = load_answers(cmd.answers);
  const auto pools = answers_by_question(questions, answers);
  const auto nli = build_scorer(cmd.nli_spec, TaskKind::nli, cmd.scorer_base);
  const auto rqe = build_scorer(cmd.rqe_spec, TaskKind::rqe, cmd.scorer_base);

  std::set<std::string> sources;
  for (const auto& answer : answers) sources.insert(answer.source);
  const std::vector<std::string> vocab(sources.begin(), sources.end());

  std::vector<std::vector<double>> rows;
  std::vector<bool> relevance;
  for (const auto& question : questions) {
    auto it = pools.find(question.id);
    if (it == pools.end()) {
      log_info("rank train: question \"" + question.id + "\" has no answers");
      continue;
    }
    const CorpusStats stats = pool_stats(it->second);
    for (const auto& answer : it->second) {
      if (!answer.relevance)
        throw DataError("answer \"" + answer.answer_id +
                        "\" has no relevance flag; training needs labeled answers");
      const auto features =
          extract_features(question, answer, *nli, *rqe, stats, cmd.bm25);
      rows.push_back(features_to_vector(features, vocab));
      relevance.push_back(*answer.relevance);
    }
  }

  LinearModel model = train_linear(rows, relevance, cmd.train);
  model.feature_names = feature_names(vocab);
  model.source_vocab = vocab;
  model.bm25 = cmd.bm25;
  save_model(cmd.model_out, model);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if ((decision_score(model, rows[i]) > 0.0) == relevance[i]) ++correct;
  log_info("rank train: " + std::to_string(rows.size()) + " examples, training accuracy " +
           format_double(static_cast<double>(correct) / static_cast<double>(rows.size())));
}

void run_rank_apply(const RankApplyCommand& cmd) {
  const auto model = load_model(cmd.model);
  const auto questions = load_questions(cmd.questions);
  const auto answers = load_answers(cmd.answers);
  const auto pools = answers_by_question(questions, answers);
  const auto nli = build_scorer(cmd.nli_spec, TaskKind::nli, cmd.scorer_base);
  const auto rqe = build_scorer(cmd.rqe_spec, TaskKind::rqe, cmd.scorer_base);

  std::string out;
  for (const auto& question : questions) {
    auto it = pools.find(question.id);
    if (it == pools.end()) continue;
    const CorpusStats stats = pool_stats(it->second);
    out += rankings_to_jsonl(question.id,
                             rank_answers(question, it->second, model, *nli, *rqe, stats));
  }
  write_file_atomic(cmd.out, out);
  log_info("rank apply: " + std::to_string(questions.size()) + " questions");
}

std::map<std::string, std::string> load_labeling(const std::filesystem::path& path,
                                                 TaskKind task) {
  std::map<std::string, std::string> labeling;
  const auto put = [&](const std::string& pair_id, const std::string& label) {
    if (!is_task_label(task, label))
      throw DataError(path.string() + ": label \"" + label + "\" is not a " +
                      std::string(task_name(task)) + " label");
    if (!labeling.emplace(pair_id, label).second)
      throw DataError(path.string() + ": duplicate label for pair \"" + pair_id + "\"");
  };

  if (sniff_pair_format(path) == PairFormat::tsv) {
    for (const auto& pair : load_pairs(path, task, PairFormat::tsv)) {
      if (!pair.label)
        throw DataError(path.string() + ": pair \"" + pair.id + "\" has no label");
      put(pair.id, *pair.label);
    }
    return labeling;
  }

  const auto record = first_record(path);
  if (!record) return labeling;
  if (record->contains("probs")) {
    const auto records = load_predictions(path, task);
    std::set<std::string> models;
    for (const auto& rec : records) models.insert(rec.model_name);
    if (models.size() > 1)
      throw DataError(path.string() + ": holds " + std::to_string(models.size()) +
                      " models; evaluation needs a single labeling");
    for (const auto& rec : records) put(rec.pair_id, argmax_label(rec.probs));
  } else if (record->contains("pair_id")) {
    for (const auto& rec : load_labels(path)) put(rec.pair_id, rec.label);
  } else {
    for (const auto& pair : load_pairs(path, task, PairFormat::jsonl)) {
      if (!pair.label)
        throw DataError(path.string() + ": pair \"" + pair.id + "\" has no label");
      put(pair.id, *pair.label);
    }
  }
  return labeling;
}

void run_eval(const EvalCommand& cmd) {
  const auto gold = load_labeling(cmd.gold, cmd.task);
  const auto pred = load_labeling(cmd.pred, cmd.task);
  const auto report = evaluate(gold, pred, cmd.task);
  std::cout << report_to_text(report);
  if (cmd.report) write_file_atomic(*cmd.report, report_to_json(report));
}

void run_stats(const StatsCommand& cmd) {
  const auto answers = load_answers(cmd.answers);
  const auto stats = dataset_stats(answers);
  std::string text;
  text += "questions: " + std::to_string(stats.question_count) + "\n";
  text += "avg answers per question: " + format_double(stats.avg_answer_count) + "\n";
  text += "avg answer length (tokens): " + format_double(stats.avg_answer_length) + "\n";
  std::cout << text;
  if (cmd.report) {
    json obj;
    obj["question_count"] = stats.question_count;
    obj["avg_answer_count"] = stats.avg_answer_count;
    obj["avg_answer_length"] = stats.avg_answer_length;
    write_file_atomic(*cmd.report, obj.dump(2) + "\n");
  }
}

}  // namespace medtext
