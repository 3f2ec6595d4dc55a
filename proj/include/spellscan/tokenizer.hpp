#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace spellscan {

class SpellLexicon;
struct Segment;

struct SpecialIds {
  int pad = 0;
  int unk = 0;
  int cls = 0;
  int sep = 0;
};

// WordPiece vocabulary; token id = position in the piece list.
class Vocabulary {
 public:
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";
  static constexpr std::string_view kContinuation = "##";

  Vocabulary() = default;
  // Throws VocabError on duplicates, empty input or missing special pieces.
  explicit Vocabulary(std::vector<std::string> pieces);

  std::size_t size() const { return pieces_.size(); }
  const std::string& piece(int id) const { return pieces_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& pieces() const { return pieces_; }
  std::optional<int> id_of(std::string_view piece) const;
  bool contains(std::string_view piece) const { return id_of(piece).has_value(); }
  const SpecialIds& special() const { return special_; }
  std::size_t max_piece_bytes() const { return max_piece_bytes_; }

  // File content: one piece per line, each line terminated by '\n'.
  std::string to_text() const;
  std::string hash() const;

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> index_;
  SpecialIds special_;
  std::size_t max_piece_bytes_ = 0;
};

Vocabulary load_vocab(const std::filesystem::path& path);
Vocabulary parse_vocab(std::string_view content);
void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path);

struct Word {
  std::string text;
  std::size_t start = 0;  // byte offsets into the source text
  std::size_t end = 0;
};

// Whitespace split with every punctuation character detached as its own word.
std::vector<Word> split_words(std::string_view text);

// Greedy longest-match-first WordPiece; [UNK] when the word cannot be covered.
std::vector<std::string> tokenize_word(std::string_view word, const Vocabulary& vocab);

// Piece count of `text` without special or padding tokens.
std::size_t count_tokens(std::string_view text, const Vocabulary& vocab);

struct Encoding {
  std::vector<int> ids;                    // length max_len
  std::vector<std::string> pieces;         // aligned with ids, includes specials and padding
  std::vector<std::optional<int>> word_ids;
  std::vector<std::uint8_t> attention_mask;
  bool truncated = false;

  int real_length() const;
};

Encoding encode_words(std::span<const std::string> words, const Vocabulary& vocab, int max_len);
Encoding encode_text(std::string_view text, const Vocabulary& vocab, int max_len);
Encoding encode_segment(const Segment& segment, const Vocabulary& vocab, int max_len);

struct VocabExtension {
  Vocabulary vocab;
  int added = 0;
};

// Appends every lexicon word that is not already a whole piece. Words are
// the split_words units of each phrase, so they match what encoding sees.
VocabExtension extend_vocab(const Vocabulary& vocab, const SpellLexicon& lexicon);

// Distinct words of all lexicon phrases, in lexicon order.
std::vector<std::string> lexicon_words(const SpellLexicon& lexicon);

// Merges continuation runs back into words; throws TokenizeError on a leading
// continuation piece.
std::vector<std::string> detokenize(std::span<const std::string> pieces);

// Frequency-ranked vocabulary from word counts: specials, every seen character
// (plain and continuation form), then whole words, prefixes and continuation
// substrings by descending weighted frequency until `target_size`. Pieces in
// `excluded_words` are never added as whole pieces.
Vocabulary build_vocab_by_frequency(const std::map<std::string, std::size_t>& word_counts,
                                    std::size_t target_size,
                                    const std::unordered_set<std::string>& excluded_words);

}  // namespace spellscan
