#include "medtext/rank.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <json.hpp>

#include "medtext/constrain.hpp"
#include "medtext/error.hpp"
#include "medtext/io.hpp"
#include "medtext/preprocess.hpp"

namespace medtext {
namespace {

using nlohmann::json;

bool is_subquestion(const std::string& sentence) {
  std::size_t end = sentence.size();
  auto skippable = [](char c) {
    return c == ')' || c == ']' || c == '}' || c == '"' || c == '\'' || c == ' ';
  };
  while (end > 0 && skippable(sentence[end - 1])) --end;
  return end > 0 && sentence[end - 1] == '?';
}

void standardize(const LinearModel& model, std::vector<double>& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double scale = model.variances[i] > 0.0 ? std::sqrt(model.variances[i]) : 1.0;
    x[i] = (x[i] - model.means[i]) / scale;
  }
}

}  // namespace

void validate_bm25_params(const Bm25Params& params) {
  if (!(params.k1 > 0.0)) throw DataError("bm25 k1 must be positive");
  if (!(params.b >= 0.0 && params.b <= 1.0)) throw DataError("bm25 b must be in [0, 1]");
}

std::vector<std::string> bm25_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  for (const auto& token : tokenize(text)) {
    bool alnum = std::any_of(token.text.begin(), token.text.end(),
                             [](unsigned char c) { return std::isalnum(c) != 0; });
    if (!alnum) continue;
    std::string low = token.text;
    for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    tokens.push_back(std::move(low));
  }
  return tokens;
}

CorpusStats build_stats(const std::vector<std::vector<std::string>>& docs) {
  CorpusStats stats;
  stats.doc_count = docs.size();
  std::size_t token_total = 0;
  for (const auto& doc : docs) {
    token_total += doc.size();
    std::set<std::string> distinct(doc.begin(), doc.end());
    for (const auto& term : distinct) ++stats.df[term];
  }
  if (!docs.empty())
    stats.avgdl = static_cast<double>(token_total) / static_cast<double>(docs.size());
  return stats;
}

double idf(const std::string& term, const CorpusStats& stats) {
  auto it = stats.df.find(term);
  const double n = it == stats.df.end() ? 0.0 : static_cast<double>(it->second);
  const double N = static_cast<double>(stats.doc_count);
  return std::log((N - n + 0.5) / (n + 0.5));
}

double bm25(const std::vector<std::string>& query, const std::vector<std::string>& doc,
            const Bm25Params& params, const CorpusStats& stats) {
  validate_bm25_params(params);
  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& term : doc) ++tf[term];
  const double doc_len = static_cast<double>(doc.size());
  const double length_ratio = stats.avgdl > 0.0 ? doc_len / stats.avgdl : 0.0;
  double score = 0.0;
  for (const auto& term : query) {
    auto it = tf.find(term);
    if (it == tf.end()) continue;  // f = 0 contributes nothing
    const double f = static_cast<double>(it->second);
    score += idf(term, stats) * f * (params.k1 + 1.0) /
             (f + params.k1 * (1.0 - params.b + params.b * length_ratio));
  }
  return score;
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
  std::vector<Question> questions;
  std::set<std::string> seen;
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
    const std::string context = path.string() + ":" + std::to_string(line_no);
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw DataError(context + ": invalid JSON object");
    Question q;
    if (!obj.contains("question_id") || !obj["question_id"].is_string() ||
        obj["question_id"].get<std::string>().empty())
      throw DataError(context + ": missing field \"question_id\"");
    if (!obj.contains("text") || !obj["text"].is_string() ||
        obj["text"].get<std::string>().empty())
      throw DataError(context + ": missing field \"text\"");
    q.id = obj["question_id"].get<std::string>();
    q.text = obj["text"].get<std::string>();
    if (!seen.insert(q.id).second)
      throw DataError(context + ": duplicate question id \"" + q.id + "\"");
    questions.push_back(std::move(q));
  }
  return questions;
}

RankFeatures extract_features(const Question& question, const AnswerCandidate& answer,
                              const Scorer& nli, const Scorer& rqe,
                              const CorpusStats& stats, const Bm25Params& params) {
  if (nli.task() != TaskKind::nli)
    throw DataError("scorer \"" + nli.name() + "\" is not an nli scorer");
  if (rqe.task() != TaskKind::rqe)
    throw DataError("scorer \"" + rqe.name() + "\" is not an rqe scorer");

  RankFeatures features;
  features.source = answer.source;
  features.bm25 = bm25(bm25_tokens(question.text), bm25_tokens(answer.text), params, stats);

  const auto sentences = split_sentences(answer.text);
  double entail_sum = 0.0;
  std::size_t declarative = 0, contradict = 0;
  double rqe_sum = 0.0;
  std::size_t subquestions = 0;

  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const std::string pair_tag = question.id + "#" + answer.answer_id + "#";
    if (is_subquestion(sentences[i])) {
      ScoreRequest request{question.text, sentences[i], pair_tag + "q" + std::to_string(i)};
      const double p_true = rqe.score(request).at("true");
      features.rqe_max = std::max(features.rqe_max, p_true);
      rqe_sum += p_true;
      ++subquestions;
    } else {
      ScoreRequest request{sentences[i], question.text, pair_tag + "s" + std::to_string(i)};
      const Probs probs = nli.score(request);
      const double p_entail = probs.at("entailment");
      features.nli_max_entail = std::max(features.nli_max_entail, p_entail);
      entail_sum += p_entail;
      if (argmax_label(probs) == "contradiction") ++contradict;
      ++declarative;
    }
  }
  if (declarative > 0) {
    features.nli_mean_entail = entail_sum / static_cast<double>(declarative);
    features.nli_frac_contradict =
        static_cast<double>(contradict) / static_cast<double>(declarative);
  }
  if (subquestions > 0) features.rqe_mean = rqe_sum / static_cast<double>(subquestions);
  features.subq_count = static_cast<double>(subquestions);
  return features;
}

std::vector<std::string> feature_names(const std::vector<std::string>& source_vocab) {
  std::vector<std::string> names{"bm25",         "nli_max_entail", "nli_mean_entail",
                                 "nli_frac_contradict", "rqe_max", "rqe_mean",
                                 "subq_count"};
  for (const auto& source : source_vocab) names.push_back("source=" + source);
  return names;
}

std::vector<double> features_to_vector(const RankFeatures& features,
                                       const std::vector<std::string>& source_vocab) {
  std::vector<double> x{features.bm25,     features.nli_max_entail,
                        features.nli_mean_entail, features.nli_frac_contradict,
                        features.rqe_max,  features.rqe_mean,
                        features.subq_count};
  for (const auto& source : source_vocab)
    x.push_back(source == features.source ? 1.0 : 0.0);
  return x;
}

LinearModel train_linear(const std::vector<std::vector<double>>& features,
                         const std::vector<bool>& relevance, const TrainOptions& options) {
  if (features.size() != relevance.size())
    throw DataError("feature rows and labels differ in count");
  if (features.empty()) throw DataError("training set is empty");
  const std::size_t dim = features.front().size();
  for (const auto& row : features)
    if (row.size() != dim) throw DataError("inconsistent feature dimensions");

  const std::size_t positives =
      static_cast<std::size_t>(std::count(relevance.begin(), relevance.end(), true));
  if (positives == 0 || positives == relevance.size())
    throw DataError("training needs both relevant and irrelevant examples");

  LinearModel model;
  model.means.assign(dim, 0.0);
  model.variances.assign(dim, 0.0);
  const double n = static_cast<double>(features.size());
  for (const auto& row : features)
    for (std::size_t i = 0; i < dim; ++i) model.means[i] += row[i] / n;
  for (const auto& row : features)
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = row[i] - model.means[i];
      model.variances[i] += d * d / n;
    }

  std::vector<std::vector<double>> x = features;
  for (auto& row : x) standardize(model, row);

  model.weights.assign(dim, 0.0);
  model.bias = 0.0;
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(options.seed);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    // Fisher-Yates by hand: std::shuffle is implementation-defined.
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
      std::swap(order[i], order[j]);
    }
    for (const std::size_t idx : order) {
      const double y = relevance[idx] ? 1.0 : -1.0;
      double margin = model.bias;
      for (std::size_t i = 0; i < dim; ++i) margin += model.weights[i] * x[idx][i];
      margin *= y;
      for (std::size_t i = 0; i < dim; ++i)
        model.weights[i] -= options.learning_rate * options.regularization * model.weights[i];
      if (margin < 1.0) {
        for (std::size_t i = 0; i < dim; ++i)
          model.weights[i] += options.learning_rate * y * x[idx][i];
        model.bias += options.learning_rate * y;  // bias is not regularized
      }
    }
  }
  return model;
}

double decision_score(const LinearModel& model, const std::vector<double>& raw_features) {
  if (raw_features.size() != model.weights.size())
    throw DataError("feature vector has " + std::to_string(raw_features.size()) +
                    " dimensions but the model expects " +
                    std::to_string(model.weights.size()));
  std::vector<double> x = raw_features;
  standardize(model, x);
  double score = model.bias;
  for (std::size_t i = 0; i < x.size(); ++i) score += model.weights[i] * x[i];
  return score;
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  if (model.feature_names.size() != model.weights.size() ||
      model.means.size() != model.weights.size() ||
      model.variances.size() != model.weights.size())
    throw DataError("model fields disagree on dimension");
  json obj;
  obj["feature_names"] = model.feature_names;
  obj["weights"] = model.weights;
  obj["bias"] = model.bias;
  obj["means"] = model.means;
  obj["variances"] = model.variances;
  obj["source_vocab"] = model.source_vocab;
  obj["bm25"] = {{"k1", model.bm25.k1}, {"b", model.bm25.b}};
  write_file_atomic(path, obj.dump(2) + "\n");
}

LinearModel load_model(const std::filesystem::path& path) {
  json obj = json::parse(read_file(path), nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw DataError(path.string() + ": invalid model JSON");
  LinearModel model;
  try {
    model.feature_names = obj.at("feature_names").get<std::vector<std::string>>();
    model.weights = obj.at("weights").get<std::vector<double>>();
    model.bias = obj.at("bias").get<double>();
    model.means = obj.at("means").get<std::vector<double>>();
    model.variances = obj.at("variances").get<std::vector<double>>();
    model.source_vocab = obj.at("source_vocab").get<std::vector<std::string>>();
    model.bm25.k1 = obj.at("bm25").at("k1").get<double>();
    model.bm25.b = obj.at("bm25").at("b").get<double>();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": bad model file: " + e.what());
  }
  if (model.feature_names.size() != model.weights.size() ||
      model.means.size() != model.weights.size() ||
      model.variances.size() != model.weights.size())
    throw DataError(path.string() + ": model fields disagree on dimension");
  if (model.feature_names != feature_names(model.source_vocab))
    throw DataError(path.string() + ": feature names do not match the source vocabulary");
  validate_bm25_params(model.bm25);
  return model;
}

std::vector<RankedAnswer> rank_answers(const Question& question,
                                       const std::vector<AnswerCandidate>& answers,
                                       const LinearModel& model, const Scorer& nli,
                                       const Scorer& rqe, const CorpusStats& stats) {
  struct Row {
    const AnswerCandidate* answer;
    double score;
  };
  std::vector<Row> rows;
  rows.reserve(answers.size());
  for (const auto& answer : answers) {
    const auto features = extract_features(question, answer, nli, rqe, stats, model.bm25);
    rows.push_back({&answer, decision_score(model, features_to_vector(features, model.source_vocab))});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.score != y.score) return x.score > y.score;
    const auto hint = [](const Row& r) {
      return r.answer->rank_hint.value_or(std::numeric_limits<std::int64_t>::max());
    };
    if (hint(x) != hint(y)) return hint(x) < hint(y);
    return x.answer->answer_id < y.answer->answer_id;
  });
  std::vector<RankedAnswer> ranking;
  ranking.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    ranking.push_back({rows[i].answer->answer_id, rows[i].score, i + 1});
  return ranking;
}

std::string rankings_to_jsonl(const std::string& question_id,
                              const std::vector<RankedAnswer>& ranking) {
  std::string out;
  for (const auto& entry : ranking) {
    json obj;
    obj["question_id"] = question_id;
    obj["answer_id"] = entry.answer_id;
    obj["rank"] = entry.rank;
    obj["score"] = entry.score;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace medtext
