#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace medtext {

// Reads a whole file; throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes through a temp file in the target directory, then renames over
// path, so readers never observe a partial file. Creates parent
// directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace medtext
