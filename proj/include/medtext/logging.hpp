#pragma once

#include <string_view>

namespace medtext {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from the MEDTEXT_LOG environment variable
// ("error"|"warn"|"info"|"debug" or 0..3); default is warn.
LogLevel log_threshold();

void log_message(LogLevel level, std::string_view msg);
void log_info(std::string_view msg);
void log_debug(std::string_view msg);

}  // namespace medtext
