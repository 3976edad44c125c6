#include "medtext/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace medtext {

namespace {

LogLevel parse_level(const char* value) {
  if (value == nullptr) return LogLevel::warn;
  const std::string v(value);
  if (v == "error" || v == "0") return LogLevel::error;
  if (v == "warn" || v == "1") return LogLevel::warn;
  if (v == "info" || v == "2") return LogLevel::info;
  if (v == "debug" || v == "3") return LogLevel::debug;
  return LogLevel::warn;
}

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::error: return "error";
    case LogLevel::warn: return "warn";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_threshold() {
  static const LogLevel level = parse_level(std::getenv("MEDTEXT_LOG"));
  return level;
}

void log_message(LogLevel level, std::string_view msg) {
  if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
  std::cerr << "[" << level_tag(level) << "] " << msg << "\n";
}

void log_info(std::string_view msg) { log_message(LogLevel::info, msg); }
void log_debug(std::string_view msg) { log_message(LogLevel::debug, msg); }

}  // namespace medtext
