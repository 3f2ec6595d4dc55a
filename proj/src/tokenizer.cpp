#include "spellscan/tokenizer.hpp"

#include <algorithm>

#include "spellscan/corpus.hpp"
#include "spellscan/errors.hpp"
#include "spellscan/hash.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/spellbook.hpp"
#include "spellscan/text.hpp"

namespace spellscan {
namespace {

constexpr std::size_t kMaxWordBytes = 100;

bool starts_with_continuation(std::string_view piece) {
  return piece.size() > Vocabulary::kContinuation.size() &&
         piece.substr(0, Vocabulary::kContinuation.size()) == Vocabulary::kContinuation;
}

bool is_boundary(std::string_view s, std::size_t pos) {
  return pos == s.size() || (static_cast<unsigned char>(s[pos]) & 0xC0) != 0x80;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw VocabError("empty vocabulary");
  index_.reserve(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (p.empty()) throw VocabError("empty piece at line " + std::to_string(i + 1));
    if (!index_.emplace(p, static_cast<int>(i)).second) {
      throw VocabError("duplicate piece '" + p + "' at line " + std::to_string(i + 1));
    }
    max_piece_bytes_ = std::max(max_piece_bytes_, p.size());
  }
  auto require = [this](std::string_view name) {
    auto id = id_of(name);
    if (!id) throw VocabError("missing special piece " + std::string(name));
    return *id;
  };
  special_.pad = require(kPad);
  special_.unk = require(kUnk);
  special_.cls = require(kCls);
  special_.sep = require(kSep);
}

std::optional<int> Vocabulary::id_of(std::string_view piece) const {
  auto it = index_.find(std::string(piece));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_text() const {
  std::string out;
  for (const auto& p : pieces_) {
    out += p;
    out += '\n';
  }
  return out;
}

std::string Vocabulary::hash() const { return fnv1a_hex(to_text()); }

Vocabulary parse_vocab(std::string_view content) {
  std::vector<std::string> pieces;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pieces.emplace_back(line);
    pos = end + 1;
  }
  return Vocabulary(std::move(pieces));
}

Vocabulary load_vocab(const std::filesystem::path& path) {
  try {
    return parse_vocab(read_file(path));
  } catch (const VocabError& e) {
    throw VocabError(path.string() + ": " + e.what());
  }
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
  write_file(path, vocab.to_text());
}

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t pos = 0;
  std::size_t word_start = std::string_view::npos;
  auto flush = [&](std::size_t end) {
    if (word_start != std::string_view::npos) {
      words.push_back(Word{std::string(text.substr(word_start, end - word_start)), word_start, end});
      word_start = std::string_view::npos;
    }
  };
  while (pos < text.size()) {
    auto cp = decode_utf8(text, pos);
    const std::size_t len = cp ? cp->length : 1;
    const char32_t value = cp ? cp->value : 0xFFFD;
    if (is_space(value)) {
      flush(pos);
    } else if (is_punctuation(value)) {
      flush(pos);
      words.push_back(Word{std::string(text.substr(pos, len)), pos, pos + len});
    } else if (word_start == std::string_view::npos) {
      word_start = pos;
    }
    pos += len;
  }
  flush(text.size());
  return words;
}

std::vector<std::string> tokenize_word(std::string_view word, const Vocabulary& vocab) {
  const std::string unk(Vocabulary::kUnk);
  if (word.empty() || word.size() > kMaxWordBytes) return {unk};
  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::string candidate;
  while (start < word.size()) {
    std::size_t end = std::min(word.size(), start + vocab.max_piece_bytes());
    bool found = false;
    for (; end > start; --end) {
      if (!is_boundary(word, end)) continue;
      candidate.clear();
      if (start > 0) candidate += Vocabulary::kContinuation;
      candidate.append(word.substr(start, end - start));
      if (vocab.contains(candidate)) {
        found = true;
        break;
      }
    }
    if (!found) return {unk};
    pieces.push_back(candidate);
    start = end;
  }
  return pieces;
}

std::size_t count_tokens(std::string_view text, const Vocabulary& vocab) {
  std::size_t n = 0;
  for (const auto& w : split_words(text)) n += tokenize_word(w.text, vocab).size();
  return n;
}

int Encoding::real_length() const {
  return static_cast<int>(std::count(attention_mask.begin(), attention_mask.end(), 1));
}

Encoding encode_words(std::span<const std::string> words, const Vocabulary& vocab, int max_len) {
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
  const auto& sp = vocab.special();
  const auto cap = static_cast<std::size_t>(max_len);
  Encoding enc;
  enc.ids.reserve(cap);
  enc.ids.push_back(sp.cls);
  enc.pieces.emplace_back(Vocabulary::kCls);
  enc.word_ids.emplace_back(std::nullopt);
  for (std::size_t w = 0; w < words.size() && !enc.truncated; ++w) {
    for (auto& piece : tokenize_word(words[w], vocab)) {
      if (enc.ids.size() + 1 >= cap) {
        enc.truncated = true;
        break;
      }
      enc.ids.push_back(*vocab.id_of(piece));
      enc.pieces.push_back(std::move(piece));
      enc.word_ids.emplace_back(static_cast<int>(w));
    }
  }
  enc.ids.push_back(sp.sep);
  enc.pieces.emplace_back(Vocabulary::kSep);
  enc.word_ids.emplace_back(std::nullopt);
  enc.attention_mask.assign(enc.ids.size(), 1);
  while (enc.ids.size() < cap) {
    enc.ids.push_back(sp.pad);
    enc.pieces.emplace_back(Vocabulary::kPad);
    enc.word_ids.emplace_back(std::nullopt);
    enc.attention_mask.push_back(0);
  }
  return enc;
}

Encoding encode_text(std::string_view text, const Vocabulary& vocab, int max_len) {
  std::vector<std::string> words;
  for (auto& w : split_words(text)) words.push_back(std::move(w.text));
  return encode_words(words, vocab, max_len);
}

Encoding encode_segment(const Segment& segment, const Vocabulary& vocab, int max_len) {
  return encode_text(segment.text, vocab, max_len);
}

std::vector<std::string> lexicon_words(const SpellLexicon& lexicon) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& phrase : lexicon.phrases(MatchMode::combined)) {
    for (auto& w : split_words(phrase.text)) {
      if (seen.insert(w.text).second) out.push_back(std::move(w.text));
    }
  }
  return out;
}

VocabExtension extend_vocab(const Vocabulary& vocab, const SpellLexicon& lexicon) {
  std::vector<std::string> pieces = vocab.pieces();
  int added = 0;
  for (auto& w : lexicon_words(lexicon)) {
    if (vocab.contains(w)) continue;
    pieces.push_back(std::move(w));
    ++added;
  }
  return VocabExtension{Vocabulary(std::move(pieces)), added};
}

std::vector<std::string> detokenize(std::span<const std::string> pieces) {
  std::vector<std::string> words;
  for (const auto& p : pieces) {
    if (starts_with_continuation(p)) {
      if (words.empty()) throw TokenizeError("continuation piece '" + p + "' has no word to extend");
      words.back().append(p.substr(Vocabulary::kContinuation.size()));
    } else {
      words.push_back(p);
    }
  }
  return words;
}

Vocabulary build_vocab_by_frequency(const std::map<std::string, std::size_t>& word_counts,
                                    std::size_t target_size,
                                    const std::unordered_set<std::string>& excluded_words) {
  std::vector<std::string> pieces = {std::string(Vocabulary::kPad), std::string(Vocabulary::kUnk),
                                     std::string(Vocabulary::kCls), std::string(Vocabulary::kSep)};
  std::unordered_set<std::string> have(pieces.begin(), pieces.end());
  auto add = [&](const std::string& p) {
    if (have.insert(p).second) pieces.push_back(p);
  };

  // Single characters guarantee every seen word can be covered.
  std::map<std::string, std::size_t> chars;
  for (const auto& [word, count] : word_counts) {
    std::size_t pos = 0;
    while (pos < word.size()) {
      auto cp = decode_utf8(word, pos);
      const std::size_t len = cp ? cp->length : 1;
      chars[word.substr(pos, len)] += count;
      pos += len;
    }
  }
  for (const auto& [c, n] : chars) add(c);
  for (const auto& [c, n] : chars) add(std::string(Vocabulary::kContinuation) + c);

  std::map<std::string, std::size_t> candidates;
  for (const auto& [word, count] : word_counts) {
    if (!excluded_words.contains(word)) candidates[word] += count * 4;
    for (std::size_t b = 0; b < word.size(); ++b) {
      if (!is_boundary(word, b)) continue;
      for (std::size_t e = b + 1; e <= std::min(word.size(), b + 8); ++e) {
        if (!is_boundary(word, e) || (b == 0 && e == word.size())) continue;
        std::string piece = b == 0 ? word.substr(0, e)
                                   : std::string(Vocabulary::kContinuation) + word.substr(b, e - b);
        if (b == 0 && excluded_words.contains(piece)) continue;
        candidates[piece] += count;
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(candidates.begin(), candidates.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [piece, n] : ranked) {
    if (pieces.size() >= target_size) break;
    add(piece);
  }
  return Vocabulary(std::move(pieces));
}

}  // namespace spellscan
