#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace spellscan {

struct CodePoint {
  char32_t value;
  std::size_t length;  // encoded byte length
};

// Decodes the code point starting at byte `pos`; nullopt on malformed input
// (overlong forms, surrogates and values above U+10FFFF are malformed).
std::optional<CodePoint> decode_utf8(std::string_view s, std::size_t pos);

// Byte offset of the first malformed sequence, or npos for valid UTF-8.
std::size_t find_invalid_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

// Start of the code point that ends right before `pos` (pos > 0).
std::size_t previous_code_point(std::string_view s, std::size_t pos);

char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view s);

bool is_horizontal_space(char32_t cp);
bool is_space(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_alphanumeric(char32_t cp);
bool is_letter(char32_t cp);

// Lowercase, normalize line endings to '\n' and trim horizontal whitespace at
// both ends of every line. Throws IngestError on invalid UTF-8 or when nothing
// but whitespace remains.
std::string normalize_text(std::string_view raw);

}  // namespace spellscan
