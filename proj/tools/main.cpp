#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medtext/commands.hpp"
#include "medtext/error.hpp"
#include "medtext/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"medtext: entailment and answer-ranking pipeline for medical Q&A text"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "medtext 1.0.0");

  // ---- expand ----
  auto* expand = app.add_subcommand(
      "expand", "Expand abbreviations from local context, then a gazetteer");
  std::string ex_pairs, ex_gaz, ex_out, ex_trace, ex_task = "nli";
  std::size_t ex_min = 2, ex_max = 6;
  bool ex_no_rejoin = false;
  expand->add_option("--pairs", ex_pairs, "sentence-pair file (jsonl or tsv)")->required();
  expand->add_option("--gazetteer", ex_gaz, "abbreviation TSV")->required();
  expand->add_option("--out", ex_out, "output pairs jsonl")->required();
  expand->add_option("--trace-out", ex_trace, "replacement trace jsonl");
  expand->add_option("--task", ex_task, "label set to validate against")
      ->check(CLI::IsMember({"nli", "rqe"}));
  expand->add_option("--min-len", ex_min, "shortest acronym window");
  expand->add_option("--max-len", ex_max, "longest acronym window");
  expand->add_flag("--no-rejoin", ex_no_rejoin,
                   "keep replacements space-joined instead of reattaching punctuation");
  expand->callback([&] {
    medtext::ExpandCommand cmd;
    cmd.pairs = ex_pairs;
    cmd.gazetteer = ex_gaz;
    cmd.out = ex_out;
    if (!ex_trace.empty()) cmd.trace_out = ex_trace;
    cmd.task = medtext::parse_task(ex_task);
    cmd.min_len = ex_min;
    cmd.max_len = ex_max;
    cmd.rejoin = !ex_no_rejoin;
    medtext::run_expand(cmd);
  });

  // ---- augment ----
  auto* augment = app.add_subcommand(
      "augment", "Append template-rewritten copies of annotated pairs");
  std::string au_pairs, au_annots, au_out, au_task = "rqe";
  std::string au_template{medtext::kDefaultTemplate};
  augment->add_option("--pairs", au_pairs, "sentence-pair file")->required();
  augment->add_option("--annotations", au_annots, "concept annotations jsonl")->required();
  augment->add_option("--out", au_out, "output pairs jsonl")->required();
  augment->add_option("--template", au_template,
                      "replacement template with {canonical} and {type}");
  augment->add_option("--task", au_task, "label set to validate against")
      ->check(CLI::IsMember({"nli", "rqe"}));
  augment->callback([&] {
    medtext::AugmentCommand cmd;
    cmd.pairs = au_pairs;
    cmd.annotations = au_annots;
    cmd.out = au_out;
    cmd.template_text = au_template;
    cmd.task = medtext::parse_task(au_task);
    medtext::run_augment(cmd);
  });

  // ---- assemble ----
  auto* assemble = app.add_subcommand(
      "assemble", "Build a training-set variant from named sources");
  std::string as_variant, as_out;
  std::string as_template{medtext::kDefaultTemplate};
  std::vector<std::string> as_sources;
  std::uint64_t as_seed = 0;
  std::size_t as_qqp_target = 9000;
  assemble->add_option("--variant", as_variant,
                       "orig | data_aug | orig_plus_dataaug_plus_qqp | "
                       "dataaug_plus_qqp | paraphrase")
      ->required();
  assemble->add_option("--src", as_sources,
                       "name=path (train, validation, annotations, qqp, paraphrase); "
                       "repeatable")
      ->expected(-1);
  assemble->add_option("--out", as_out, "output pairs jsonl")->required();
  assemble->add_option("--template", as_template, "augmentation template");
  assemble->add_option("--seed", as_seed, "seed for the qqp subsample");
  assemble->add_option("--qqp-target", as_qqp_target, "qqp subsample size");
  assemble->callback([&] {
    medtext::AssembleCommand cmd;
    cmd.variant = as_variant;
    cmd.out = as_out;
    cmd.template_text = as_template;
    cmd.seed = as_seed;
    cmd.qqp_target = as_qqp_target;
    for (const auto& source : as_sources) {
      const std::size_t eq = source.find('=');
      if (eq == std::string::npos)
        throw medtext::DataError("--src expects name=path, got \"" + source + "\"");
      const std::string name = source.substr(0, eq);
      const std::filesystem::path path = source.substr(eq + 1);
      if (name == "train") cmd.train = path;
      else if (name == "validation") cmd.validation = path;
      else if (name == "annotations") cmd.annotations = path;
      else if (name == "qqp") cmd.qqp = path;
      else if (name == "paraphrase") cmd.paraphrase = path;
      else throw medtext::DataError("unknown source name \"" + name + "\"");
    }
    medtext::run_assemble(cmd);
  });

  // ---- constrain ----
  auto* constrain = app.add_subcommand(
      "constrain", "Force one entailment/contradiction/neutral per premise group");
  std::string co_pairs, co_preds, co_out, co_report, co_model;
  constrain->add_option("--pairs", co_pairs, "nli pairs with group ids")->required();
  constrain->add_option("--preds", co_preds, "prediction jsonl")->required();
  constrain->add_option("--out", co_out, "output labels jsonl")->required();
  constrain->add_option("--report", co_report, "malformed-group report (json)");
  constrain->add_option("--model", co_model, "model to read when the file mixes models");
  constrain->callback([&] {
    medtext::ConstrainCommand cmd;
    cmd.pairs = co_pairs;
    cmd.preds = co_preds;
    cmd.out = co_out;
    if (!co_report.empty()) cmd.report = co_report;
    if (!co_model.empty()) cmd.model = co_model;
    medtext::run_constrain(cmd);
  });

  // ---- ensemble ----
  auto* ensemble = app.add_subcommand(
      "ensemble", "Majority-vote labels from several models");
  std::vector<std::string> en_preds;
  std::string en_tie_break, en_out;
  ensemble->add_option("--preds", en_preds, "label or prediction files")
      ->required()
      ->expected(-1);
  ensemble->add_option("--tie-break", en_tie_break, "model whose vote settles ties")
      ->required();
  ensemble->add_option("--out", en_out, "output labels jsonl")->required();
  ensemble->callback([&] {
    medtext::EnsembleCommand cmd;
    for (const auto& path : en_preds) cmd.preds.emplace_back(path);
    cmd.tie_break = en_tie_break;
    cmd.out = en_out;
    medtext::run_ensemble(cmd);
  });

  // ---- rank ----
  auto* rank = app.add_subcommand("rank", "Answer re-ranking");
  rank->require_subcommand(1);

  auto* rank_train = rank->add_subcommand("train", "Fit the linear ranking model");
  std::string rt_questions, rt_answers, rt_nli = "overlap", rt_rqe = "overlap", rt_model_out;
  medtext::Bm25Params rt_bm25;
  medtext::TrainOptions rt_opts;
  rank_train->add_option("--questions", rt_questions, "questions jsonl")->required();
  rank_train->add_option("--answers", rt_answers, "answers jsonl with relevance flags")
      ->required();
  rank_train->add_option("--nli", rt_nli, "nli scorer spec (overlap[:T] | external:F[:M])");
  rank_train->add_option("--rqe", rt_rqe, "rqe scorer spec");
  rank_train->add_option("--model-out", rt_model_out, "output model json")->required();
  rank_train->add_option("--k1", rt_bm25.k1, "bm25 k1");
  rank_train->add_option("--b", rt_bm25.b, "bm25 b");
  rank_train->add_option("--epochs", rt_opts.epochs, "training epochs");
  rank_train->add_option("--lr", rt_opts.learning_rate, "learning rate");
  rank_train->add_option("--reg", rt_opts.regularization, "L2 regularization");
  rank_train->add_option("--seed", rt_opts.seed, "shuffle seed");
  rank_train->callback([&] {
    medtext::RankTrainCommand cmd;
    cmd.questions = rt_questions;
    cmd.answers = rt_answers;
    cmd.nli_spec = rt_nli;
    cmd.rqe_spec = rt_rqe;
    cmd.model_out = rt_model_out;
    cmd.bm25 = rt_bm25;
    cmd.train = rt_opts;
    medtext::run_rank_train(cmd);
  });

  auto* rank_apply = rank->add_subcommand("apply", "Rank answer candidates");
  std::string ra_questions, ra_answers, ra_nli = "overlap", ra_rqe = "overlap", ra_model,
      ra_out;
  rank_apply->add_option("--questions", ra_questions, "questions jsonl")->required();
  rank_apply->add_option("--answers", ra_answers, "answers jsonl")->required();
  rank_apply->add_option("--nli", ra_nli, "nli scorer spec");
  rank_apply->add_option("--rqe", ra_rqe, "rqe scorer spec");
  rank_apply->add_option("--model", ra_model, "model json from rank train")->required();
  rank_apply->add_option("--out", ra_out, "output ranking jsonl")->required();
  rank_apply->callback([&] {
    medtext::RankApplyCommand cmd;
    cmd.questions = ra_questions;
    cmd.answers = ra_answers;
    cmd.nli_spec = ra_nli;
    cmd.rqe_spec = ra_rqe;
    cmd.model = ra_model;
    cmd.out = ra_out;
    medtext::run_rank_apply(cmd);
  });

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
  std::string ev_gold, ev_pred, ev_task, ev_report;
  eval->add_option("--gold", ev_gold, "labeled pairs file or labels jsonl")->required();
  eval->add_option("--pred", ev_pred, "labels jsonl or prediction jsonl")->required();
  eval->add_option("--task", ev_task, "nli or rqe")
      ->required()
      ->check(CLI::IsMember({"nli", "rqe"}));
  eval->add_option("--report", ev_report, "also write a json report here");
  eval->callback([&] {
    medtext::EvalCommand cmd;
    cmd.gold = ev_gold;
    cmd.pred = ev_pred;
    cmd.task = medtext::parse_task(ev_task);
    if (!ev_report.empty()) cmd.report = ev_report;
    medtext::run_eval(cmd);
  });

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "Describe an answer-candidate set");
  std::string st_answers, st_report;
  stats->add_option("--answers", st_answers, "answers jsonl")->required();
  stats->add_option("--report", st_report, "also write a json report here");
  stats->callback([&] {
    medtext::StatsCommand cmd;
    cmd.answers = st_answers;
    if (!st_report.empty()) cmd.report = st_report;
    medtext::run_stats(cmd);
  });

  // ---- pipeline ----
  auto* pipeline = app.add_subcommand("pipeline", "Run stages from a config file");
  std::string pi_config;
  pipeline->add_option("--config", pi_config, "pipeline config file")->required();
  pipeline->callback([&] { medtext::run_pipeline(pi_config); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const medtext::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
