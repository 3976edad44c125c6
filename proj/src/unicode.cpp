#include "medtext/unicode.hpp"

#include "medtext/error.hpp"

namespace medtext {

namespace {

[[noreturn]] void bad_utf8(std::size_t offset) {
  throw DataError("invalid UTF-8 at byte " + std::to_string(offset));
}

}  // namespace

std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      bad_utf8(i);
    }
    if (i + len > text.size()) bad_utf8(i);
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char bk = static_cast<unsigned char>(text[i + k]);
      if ((bk & 0xC0) != 0x80) bad_utf8(i + k);
      cp = (cp << 6) | (bk & 0x3F);
    }
    // Reject overlong encodings, surrogates and out-of-range values.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      bad_utf8(i);
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

std::size_t cp_length(std::string_view text) { return decode_utf8(text).size(); }

std::string cp_substr(std::string_view text, std::size_t start, std::size_t end) {
  const auto cps = decode_utf8(text);
  if (start > cps.size()) start = cps.size();
  if (end > cps.size()) end = cps.size();
  if (start >= end) return {};
  const std::size_t byte_from = cps[start].byte_offset;
  const std::size_t byte_to = (end == cps.size())
                                  ? text.size()
                                  : cps[end].byte_offset;
  return std::string(text.substr(byte_from, byte_to - byte_from));
}

}  // namespace medtext
