#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medtext/augment.hpp"
#include "medtext/corpus.hpp"
#include "medtext/rank.hpp"
#include "medtext/scorer.hpp"

namespace medtext {

// Scorer spec strings, shared by the rank commands and the pipeline:
//   "overlap"            lexical-overlap baseline, temperature 1
//   "overlap:0.5"        same with an explicit temperature
//   "external:F"         stored predictions from file F (single model)
//   "external:F:M"       stored predictions, model M
// base_dir resolves a relative F (pipeline configs resolve against the
// config file's directory; the CLI passes ".").
std::unique_ptr<Scorer> build_scorer(const std::string& spec, TaskKind task,
                                     const std::filesystem::path& base_dir);

// Returns the external-predictions path inside a spec, if any; lets the
// pipeline pre-flight check scorer inputs like any other input file.
std::optional<std::string> scorer_spec_path(const std::string& spec);

struct ExpandCommand {
  std::filesystem::path pairs;
  std::filesystem::path gazetteer;
  std::filesystem::path out;
  std::optional<std::filesystem::path> trace_out;
  TaskKind task = TaskKind::nli;
  std::size_t min_len = 2;
  std::size_t max_len = 6;
  bool rejoin = true;
};
void run_expand(const ExpandCommand& cmd);

struct AugmentCommand {
  std::filesystem::path pairs;
  std::filesystem::path annotations;
  std::filesystem::path out;
  std::string template_text{kDefaultTemplate};
  TaskKind task = TaskKind::rqe;
};
void run_augment(const AugmentCommand& cmd);

struct AssembleCommand {
  std::string variant;
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> validation;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> qqp;
  std::optional<std::filesystem::path> paraphrase;
  std::filesystem::path out;
  std::string template_text{kDefaultTemplate};
  std::uint64_t seed = 0;
  std::size_t qqp_target = 9000;
};
void run_assemble(const AssembleCommand& cmd);

struct ConstrainCommand {
  std::filesystem::path pairs;
  std::filesystem::path preds;
  std::filesystem::path out;
  std::optional<std::filesystem::path> report;
  std::optional<std::string> model;  // required when the file mixes models
};
void run_constrain(const ConstrainCommand& cmd);

struct EnsembleCommand {
  std::vector<std::filesystem::path> preds;  // label or prediction files
  std::string tie_break;
  std::filesystem::path out;
};
void run_ensemble(const EnsembleCommand& cmd);

struct RankTrainCommand {
  std::filesystem::path questions;
  std::filesystem::path answers;
  std::string nli_spec = "overlap";
  std::string rqe_spec = "overlap";
  std::filesystem::path model_out;
  Bm25Params bm25;
  TrainOptions train;
  std::filesystem::path scorer_base = ".";
};
void run_rank_train(const RankTrainCommand& cmd);

struct RankApplyCommand {
  std::filesystem::path questions;
  std::filesystem::path answers;
  std::string nli_spec = "overlap";
  std::string rqe_spec = "overlap";
  std::filesystem::path model;
  std::filesystem::path out;
  std::filesystem::path scorer_base = ".";
};
void run_rank_apply(const RankApplyCommand& cmd);

struct EvalCommand {
  std::filesystem::path gold;  // pairs file or labels file
  std::filesystem::path pred;  // labels file or predictions file
  TaskKind task = TaskKind::nli;
  std::optional<std::filesystem::path> report;
};
// Prints the text report to stdout; --report also writes JSON.
void run_eval(const EvalCommand& cmd);

struct StatsCommand {
  std::filesystem::path answers;
  std::optional<std::filesystem::path> report;
};
void run_stats(const StatsCommand& cmd);

// Shared loaders that sniff what kind of labeling a file holds.
std::map<std::string, std::string> load_labeling(const std::filesystem::path& path,
                                                 TaskKind task);

}  // namespace medtext
