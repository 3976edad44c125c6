#include "medtext/pipeline.hpp"

#include <algorithm>
#include <set>

#include "medtext/commands.hpp"
#include "medtext/error.hpp"
#include "medtext/io.hpp"
#include "medtext/logging.hpp"

namespace medtext {
namespace {

struct StageSpec {
  std::set<std::string> required;
  std::set<std::string> optional;
  std::set<std::string> inputs;   // keys holding input paths
  std::set<std::string> outputs;  // keys holding output paths
};

const std::map<std::string, StageSpec>& stage_specs() {
  static const std::map<std::string, StageSpec> specs{
      {"expand",
       {{"pairs", "gazetteer", "out"},
        {"trace_out", "task", "min_len", "max_len", "rejoin"},
        {"pairs", "gazetteer"},
        {"out", "trace_out"}}},
      {"augment",
       {{"pairs", "annotations", "out"},
        {"template", "task"},
        {"pairs", "annotations"},
        {"out"}}},
      {"assemble",
       {{"variant", "out"},
        {"train", "validation", "annotations", "qqp", "paraphrase", "template",
         "qqp_target", "seed"},
        {"train", "validation", "annotations", "qqp", "paraphrase"},
        {"out"}}},
      {"constrain",
       {{"pairs", "preds", "out"},
        {"model", "report"},
        {"pairs", "preds"},
        {"out", "report"}}},
      {"ensemble", {{"preds", "tie_break", "out"}, {}, {}, {"out"}}},
      {"rank_train",
       {{"questions", "answers", "model_out"},
        {"nli", "rqe", "k1", "b", "epochs", "learning_rate", "regularization", "seed"},
        {"questions", "answers"},
        {"model_out"}}},
      {"rank_apply",
       {{"questions", "answers", "model", "out"},
        {"nli", "rqe"},
        {"questions", "answers", "model"},
        {"out"}}},
      {"eval", {{"gold", "pred"}, {"task", "report"}, {"gold", "pred"}, {"report"}}},
      {"stats", {{"answers"}, {"report"}, {"answers"}, {"report"}}},
  };
  return specs;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  for (char c : value) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!current.empty()) items.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) items.push_back(std::move(current));
  return items;
}

// Typed getters over a stage's key/value map.

class StageView {
 public:
  StageView(const PipelineStage& stage, const std::filesystem::path& base_dir)
      : stage_(stage), base_(base_dir) {}

  std::string context() const {
    return "stage [" + stage_.name + "] (line " + std::to_string(stage_.line) + ")";
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = stage_.values.find(key);
    if (it == stage_.values.end()) return std::nullopt;
    return it->second;
  }

  std::string require(const std::string& key) const {
    auto value = get(key);
    if (!value) throw DataError(context() + ": missing key \"" + key + "\"");
    return *value;
  }

  std::filesystem::path resolve(const std::string& value) const {
    std::filesystem::path path = value;
    return path.is_relative() ? base_ / path : path;
  }

  std::filesystem::path path(const std::string& key) const { return resolve(require(key)); }

  std::optional<std::filesystem::path> optional_path(const std::string& key) const {
    auto value = get(key);
    if (!value) return std::nullopt;
    return resolve(*value);
  }

  std::size_t size_value(const std::string& key, std::size_t fallback) const {
    auto value = get(key);
    if (!value) return fallback;
    try {
      return static_cast<std::size_t>(std::stoull(*value));
    } catch (const std::exception&) {
      throw DataError(context() + ": key \"" + key + "\" is not a whole number");
    }
  }

  std::uint64_t seed_value(const std::string& key, std::uint64_t fallback) const {
    return size_value(key, fallback);
  }

  double double_value(const std::string& key, double fallback) const {
    auto value = get(key);
    if (!value) return fallback;
    try {
      return std::stod(*value);
    } catch (const std::exception&) {
      throw DataError(context() + ": key \"" + key + "\" is not a number");
    }
  }

  bool bool_value(const std::string& key, bool fallback) const {
    auto value = get(key);
    if (!value) return fallback;
    if (*value == "true") return true;
    if (*value == "false") return false;
    throw DataError(context() + ": key \"" + key + "\" must be true or false");
  }

  TaskKind task_value(const std::string& key, std::optional<TaskKind> global,
                      std::optional<TaskKind> fallback) const {
    if (auto value = get(key)) {
      try {
        return parse_task(*value);
      } catch (const DataError& e) {
        throw DataError(context() + ": " + e.what());
      }
    }
    if (global) return *global;
    if (fallback) return *fallback;
    throw DataError(context() + ": no task given and no global task set");
  }

 private:
  const PipelineStage& stage_;
  std::filesystem::path base_;
};

void check_keys(const PipelineStage& stage) {
  auto spec_it = stage_specs().find(stage.name);
  if (spec_it == stage_specs().end())
    throw DataError("unknown pipeline stage [" + stage.name + "] at line " +
                    std::to_string(stage.line));
  const StageSpec& spec = spec_it->second;
  for (const auto& key : spec.required)
    if (!stage.values.count(key))
      throw DataError("stage [" + stage.name + "] (line " + std::to_string(stage.line) +
                      "): missing key \"" + key + "\"");
  for (const auto& [key, value] : stage.values) {
    (void)value;
    if (!spec.required.count(key) && !spec.optional.count(key))
      throw DataError("stage [" + stage.name + "] (line " + std::to_string(stage.line) +
                      "): unknown key \"" + key + "\"");
  }
}

std::filesystem::path normalize(const std::filesystem::path& path) {
  return std::filesystem::absolute(path).lexically_normal();
}

// Every input must already exist or be written by an earlier stage.
void preflight(const PipelineConfig& config, const std::filesystem::path& base_dir) {
  std::set<std::string> produced;
  for (const auto& stage : config.stages) {
    const StageSpec& spec = stage_specs().at(stage.name);
    StageView view(stage, base_dir);

    std::vector<std::filesystem::path> inputs;
    for (const auto& key : spec.inputs)
      if (auto path = view.optional_path(key)) inputs.push_back(*path);
    if (stage.name == "ensemble")
      for (const auto& item : split_list(view.require("preds")))
        inputs.push_back(view.resolve(item));
    for (const char* key : {"nli", "rqe"}) {
      if (auto spec_value = view.get(key))
        if (auto path = scorer_spec_path(*spec_value)) inputs.push_back(view.resolve(*path));
    }

    for (const auto& input : inputs) {
      if (std::filesystem::exists(input)) continue;
      if (produced.count(normalize(input).string())) continue;
      throw DataError(view.context() + ": input \"" + input.string() +
                      "\" does not exist and no earlier stage writes it");
    }
    for (const auto& key : spec.outputs)
      if (auto path = view.optional_path(key))
        produced.insert(normalize(*path).string());
  }
}

void run_stage(const PipelineStage& stage, const PipelineConfig& config,
               const std::filesystem::path& base_dir) {
  StageView view(stage, base_dir);
  log_info("pipeline: running " + view.context());

  if (stage.name == "expand") {
    ExpandCommand cmd;
    cmd.pairs = view.path("pairs");
    cmd.gazetteer = view.path("gazetteer");
    cmd.out = view.path("out");
    cmd.trace_out = view.optional_path("trace_out");
    cmd.task = view.task_value("task", config.task, TaskKind::nli);
    cmd.min_len = view.size_value("min_len", 2);
    cmd.max_len = view.size_value("max_len", 6);
    cmd.rejoin = view.bool_value("rejoin", true);
    run_expand(cmd);
  } else if (stage.name == "augment") {
    AugmentCommand cmd;
    cmd.pairs = view.path("pairs");
    cmd.annotations = view.path("annotations");
    cmd.out = view.path("out");
    if (auto t = view.get("template")) cmd.template_text = unquote(*t);
    cmd.task = view.task_value("task", config.task, TaskKind::rqe);
    run_augment(cmd);
  } else if (stage.name == "assemble") {
    AssembleCommand cmd;
    cmd.variant = view.require("variant");
    cmd.train = view.optional_path("train");
    cmd.validation = view.optional_path("validation");
    cmd.annotations = view.optional_path("annotations");
    cmd.qqp = view.optional_path("qqp");
    cmd.paraphrase = view.optional_path("paraphrase");
    cmd.out = view.path("out");
    if (auto t = view.get("template")) cmd.template_text = unquote(*t);
    cmd.seed = view.seed_value("seed", config.seed.value_or(0));
    cmd.qqp_target = view.size_value("qqp_target", 9000);
    run_assemble(cmd);
  } else if (stage.name == "constrain") {
    ConstrainCommand cmd;
    cmd.pairs = view.path("pairs");
    cmd.preds = view.path("preds");
    cmd.out = view.path("out");
    cmd.report = view.optional_path("report");
    cmd.model = view.get("model");
    run_constrain(cmd);
  } else if (stage.name == "ensemble") {
    EnsembleCommand cmd;
    for (const auto& item : split_list(view.require("preds")))
      cmd.preds.push_back(view.resolve(item));
    cmd.tie_break = view.require("tie_break");
    cmd.out = view.path("out");
    run_ensemble(cmd);
  } else if (stage.name == "rank_train") {
    RankTrainCommand cmd;
    cmd.questions = view.path("questions");
    cmd.answers = view.path("answers");
    cmd.model_out = view.path("model_out");
    cmd.nli_spec = view.get("nli").value_or("overlap");
    cmd.rqe_spec = view.get("rqe").value_or("overlap");
    cmd.bm25.k1 = view.double_value("k1", cmd.bm25.k1);
    cmd.bm25.b = view.double_value("b", cmd.bm25.b);
    cmd.train.epochs = view.size_value("epochs", cmd.train.epochs);
    cmd.train.learning_rate = view.double_value("learning_rate", cmd.train.learning_rate);
    cmd.train.regularization = view.double_value("regularization", cmd.train.regularization);
    cmd.train.seed = view.seed_value("seed", config.seed.value_or(cmd.train.seed));
    cmd.scorer_base = base_dir;
    run_rank_train(cmd);
  } else if (stage.name == "rank_apply") {
    RankApplyCommand cmd;
    cmd.questions = view.path("questions");
    cmd.answers = view.path("answers");
    cmd.model = view.path("model");
    cmd.out = view.path("out");
    cmd.nli_spec = view.get("nli").value_or("overlap");
    cmd.rqe_spec = view.get("rqe").value_or("overlap");
    cmd.scorer_base = base_dir;
    run_rank_apply(cmd);
  } else if (stage.name == "eval") {
    EvalCommand cmd;
    cmd.gold = view.path("gold");
    cmd.pred = view.path("pred");
    cmd.task = view.task_value("task", config.task, std::nullopt);
    cmd.report = view.optional_path("report");
    run_eval(cmd);
  } else if (stage.name == "stats") {
    StatsCommand cmd;
    cmd.answers = view.path("answers");
    cmd.report = view.optional_path("report");
    run_stats(cmd);
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  PipelineConfig config;
  PipelineStage* current = nullptr;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string raw = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    ++line_no;

    const std::string line = trim(raw);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw DataError(where + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw DataError(where + ": empty section name");
      config.stages.push_back({name, {}, line_no});
      current = &config.stages.back();
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw DataError(where + ": empty key");

    if (!current) {
      if (key == "seed") {
        try {
          config.seed = std::stoull(value);
        } catch (const std::exception&) {
          throw DataError(where + ": seed is not a whole number");
        }
      } else if (key == "task") {
        try {
          config.task = parse_task(value);
        } catch (const DataError& e) {
          throw DataError(where + ": " + e.what());
        }
      } else {
        throw DataError(where + ": unknown global key \"" + key +
                        "\" (only seed and task may appear before the first stage)");
      }
      continue;
    }
    if (!current->values.emplace(key, value).second)
      throw DataError(where + ": duplicate key \"" + key + "\" in stage [" +
                      current->name + "]");
  }
  if (config.stages.empty())
    throw DataError(path.string() + ": config declares no stages");
  return config;
}

void run_pipeline(const std::filesystem::path& config_path) {
  const PipelineConfig config = parse_pipeline_config(config_path);
  for (const auto& stage : config.stages) check_keys(stage);
  const std::filesystem::path base_dir =
      std::filesystem::absolute(config_path).parent_path();
  preflight(config, base_dir);
  for (const auto& stage : config.stages) run_stage(stage, config, base_dir);
}

}  // namespace medtext
