#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace medtext {

struct CodePoint {
  char32_t value = 0;
  std::size_t byte_offset = 0;
  std::size_t byte_size = 0;
};

// Strict UTF-8 decode; throws DataError on malformed sequences.
std::vector<CodePoint> decode_utf8(std::string_view text);

// Length in Unicode scalar values.
std::size_t cp_length(std::string_view text);

// Substring by scalar offsets, half-open. Offsets past the end clamp.
std::string cp_substr(std::string_view text, std::size_t start, std::size_t end);

}  // namespace medtext
