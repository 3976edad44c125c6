#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

struct PipelineStage {
  std::string name;
  std::map<std::string, std::string> values;
  std::size_t line = 0;  // where the [section] header sits, for messages
};

struct PipelineConfig {
  std::optional<std::uint64_t> seed;  // global fallback for stage seeds
  std::optional<TaskKind> task;       // global fallback for stage tasks
  std::vector<PipelineStage> stages;  // run top to bottom
};

// Line-based config: optional global `seed` / `task` keys first, then one
// [stage] section per run, `key = value` lines, values optionally in
// double quotes, `#` starts a comment line. Stage names may repeat.
PipelineConfig parse_pipeline_config(const std::filesystem::path& path);

// Validates every stage's keys, checks that each input file either
// exists or is written by an earlier stage, then runs the stages in
// order. Relative paths are resolved against the config's directory.
void run_pipeline(const std::filesystem::path& config_path);

}  // namespace medtext
