#include "spellscan/text.hpp"

#include "spellscan/errors.hpp"

namespace spellscan {

std::optional<CodePoint> decode_utf8(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return std::nullopt;
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return CodePoint{b0, 1};
  std::size_t len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return std::nullopt;
  }
  if (pos + len > s.size()) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  return CodePoint{cp, len};
}

std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto cp = decode_utf8(s, pos);
    if (!cp) return pos;
    pos += cp->length;
  }
  return std::string_view::npos;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::size_t previous_code_point(std::string_view s, std::size_t pos) {
  std::size_t p = pos - 1;
  while (p > 0 && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) --p;
  return p;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  // Latin-1 supplement
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 0x20;
  // Latin Extended-A: mostly even upper / odd lower pairs
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0178) return 0x00FF;
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  // Greek and Cyrillic capitals
  if (cp >= 0x0391 && cp <= 0x03AB && cp != 0x03A2) return cp + 0x20;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
  return cp;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto cp = decode_utf8(s, pos);
    if (!cp) {
      out += s[pos++];
      continue;
    }
    if (cp->value < 0x80) {
      out += static_cast<char>(to_lower(cp->value));
    } else {
      append_utf8(out, to_lower(cp->value));
    }
    pos += cp->length;
  }
  return out;
}

bool is_horizontal_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\f' || cp == '\v' || cp == 0xA0 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_space(char32_t cp) {
  return is_horizontal_space(cp) || cp == '\n' || cp == '\r' || cp == 0x85 ||
         cp == 0x2028 || cp == 0x2029;
}

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0xA1 && cp <= 0xBF && cp != 0xAA && cp != 0xB5 && cp != 0xBA) || cp == 0xD7 ||
         cp == 0xF7 || (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x303F) || (cp >= 0xFF01 && cp <= 0xFF0F);
}

bool is_letter(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  return !is_space(cp) && !is_punctuation(cp) && !(cp >= 0x80 && cp < 0xA0);
}

bool is_alphanumeric(char32_t cp) { return (cp >= '0' && cp <= '9') || is_letter(cp); }

std::string normalize_text(std::string_view raw) {
  if (raw.empty()) throw IngestError("empty document", 0);
  if (auto bad = find_invalid_utf8(raw); bad != std::string_view::npos) {
    throw IngestError("invalid UTF-8 at byte offset " + std::to_string(bad), bad);
  }

  // Split into lines on any line-ending form, then trim and lowercase each.
  std::string out;
  out.reserve(raw.size());
  std::string line;
  auto flush_line = [&](bool newline) {
    std::size_t begin = 0;
    std::size_t end = line.size();
    while (begin < end) {
      auto cp = decode_utf8(line, begin);
      if (!is_horizontal_space(cp->value)) break;
      begin += cp->length;
    }
    while (end > begin) {
      const std::size_t prev = previous_code_point(line, end);
      if (!is_horizontal_space(decode_utf8(line, prev)->value)) break;
      end = prev;
    }
    out += to_lower(std::string_view(line).substr(begin, end - begin));
    if (newline) out += '\n';
    line.clear();
  };

  std::size_t pos = 0;
  while (pos < raw.size()) {
    const auto cp = *decode_utf8(raw, pos);
    if (cp.value == '\r') {
      flush_line(true);
      pos += (pos + 1 < raw.size() && raw[pos + 1] == '\n') ? 2 : 1;
      continue;
    }
    if (cp.value == '\n' || cp.value == 0x85 || cp.value == 0x2028 || cp.value == 0x2029) {
      flush_line(true);
    } else {
      line.append(raw.substr(pos, cp.length));
    }
    pos += cp.length;
  }
  flush_line(false);

  if (out.find_first_not_of('\n') == std::string::npos) throw IngestError("empty document", 0);
  return out;
}

}  // namespace spellscan
