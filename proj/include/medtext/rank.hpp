#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "medtext/corpus.hpp"
#include "medtext/scorer.hpp"

namespace medtext {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

void validate_bm25_params(const Bm25Params& params);  // k1 > 0, b in [0,1]

struct CorpusStats {
  std::size_t doc_count = 0;
  double avgdl = 0.0;  // average document length in tokens
  std::unordered_map<std::string, std::size_t> df;  // term -> docs containing it
};

// Lowercased tokens that carry at least one alphanumeric character;
// what BM25 and the stats run on.
std::vector<std::string> bm25_tokens(const std::string& text);

CorpusStats build_stats(const std::vector<std::vector<std::string>>& docs);

// ln((N - n + 0.5) / (n + 0.5)), n = df of the term (0 when unseen).
// May be negative; no floor is applied.
double idf(const std::string& term, const CorpusStats& stats);

// Okapi BM25; every query-token occurrence contributes (bag semantics).
double bm25(const std::vector<std::string>& query, const std::vector<std::string>& doc,
            const Bm25Params& params, const CorpusStats& stats);

struct Question {
  std::string id;
  std::string text;
};

std::vector<Question> load_questions(const std::filesystem::path& path);

struct RankFeatures {
  double bm25 = 0.0;
  double nli_max_entail = 0.0;
  double nli_mean_entail = 0.0;
  double nli_frac_contradict = 0.0;  // share of declarative sentences whose
                                     // top NLI label is contradiction
  double rqe_max = 0.0;
  double rqe_mean = 0.0;
  double subq_count = 0.0;
  std::string source;  // one-hot encoded against the model's vocabulary
};

// Splits the answer into sentences. Declarative sentences go to the NLI
// scorer (sentence as premise, question as hypothesis); sentences ending
// in '?' — closing brackets/quotes ignored — are sub-questions and go to
// the RQE scorer (question as CHQ, sub-question as FAQ). External
// scorers see pair ids "<qid>#<aid>#s<i>" (NLI) and "<qid>#<aid>#q<i>"
// (RQE), i = sentence index in the answer. Empty aggregates are 0.
RankFeatures extract_features(const Question& question, const AnswerCandidate& answer,
                              const Scorer& nli, const Scorer& rqe,
                              const CorpusStats& stats, const Bm25Params& params);

std::vector<std::string> feature_names(const std::vector<std::string>& source_vocab);
std::vector<double> features_to_vector(const RankFeatures& features,
                                       const std::vector<std::string>& source_vocab);

struct LinearModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;
  // Standardization fitted on the training data; variance <= 0 leaves a
  // feature unscaled.
  std::vector<double> means;
  std::vector<double> variances;
  std::vector<std::string> source_vocab;
  Bm25Params bm25;
};

struct TrainOptions {
  std::size_t epochs = 100;
  double learning_rate = 0.1;
  double regularization = 1e-4;
  std::uint64_t seed = 42;
};

// L2-regularized hinge loss by stochastic subgradient descent over
// standardized features; visitation order is a seeded shuffle, so a
// fixed seed reproduces the model bit for bit. Needs both classes
// present. Fills weights/bias/means/variances; the caller attaches
// feature names, source vocabulary and BM25 params.
LinearModel train_linear(const std::vector<std::vector<double>>& features,
                         const std::vector<bool>& relevance, const TrainOptions& options);

// w . standardize(x) + bias; checks the dimension.
double decision_score(const LinearModel& model, const std::vector<double>& raw_features);

void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);

struct RankedAnswer {
  std::string answer_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

// Orders one question's candidates by descending decision score; equal
// scores fall back to rank_hint (missing hints last), then answer_id.
std::vector<RankedAnswer> rank_answers(const Question& question,
                                       const std::vector<AnswerCandidate>& answers,
                                       const LinearModel& model, const Scorer& nli,
                                       const Scorer& rqe, const CorpusStats& stats);

std::string rankings_to_jsonl(const std::string& question_id,
                              const std::vector<RankedAnswer>& ranking);

}  // namespace medtext
