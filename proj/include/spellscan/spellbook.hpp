#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spellscan {

struct Segment;

enum class SpellCategory { incantation_with_name, incantation_only, name_only, action_as_spell };

std::string_view to_string(SpellCategory category);

struct SpellEntry {
  std::optional<std::string> incantation;
  std::vector<std::string> names;
  SpellCategory category = SpellCategory::incantation_only;
};

enum class MatchMode { incantations_only, combined };

std::string_view to_string(MatchMode mode);
MatchMode parse_match_mode(std::string_view name);  // incantations|combined

// One searchable phrase of the lexicon.
struct Phrase {
  std::string text;
  std::size_t entry = 0;
  bool incantation = false;
};

struct MatchSpan {
  std::string phrase;
  std::size_t start = 0;  // byte offsets into the segment text
  std::size_t end = 0;
  std::size_t entry_ref = 0;

  friend bool operator==(const MatchSpan&, const MatchSpan&) = default;
};

class SpellLexicon {
 public:
  SpellLexicon() = default;
  // Lowercases every phrase and validates: category shape, no duplicate phrase
  // across incantations and names, no overlap with the excluded phrases.
  // Throws LexiconError.
  SpellLexicon(std::vector<SpellEntry> entries, std::vector<std::string> excluded_phrases);

  const std::vector<SpellEntry>& entries() const { return entries_; }
  const std::vector<std::string>& excluded_phrases() const { return excluded_; }

  // Searchable phrases for `mode` in lexicon order.
  std::vector<Phrase> phrases(MatchMode mode) const;

  std::string to_text() const;  // canonical line-delimited form
  std::string hash() const;

 private:
  std::vector<SpellEntry> entries_;
  std::vector<std::string> excluded_;
};

SpellLexicon parse_lexicon(std::string_view content);
SpellLexicon load_lexicon(const std::filesystem::path& path);

// True when `pos` sits on a word edge: string end or a non-alphanumeric
// neighbour on that side.
bool word_boundary_before(std::string_view text, std::size_t pos);
bool word_boundary_after(std::string_view text, std::size_t pos);

// Non-overlapping lexicon phrase occurrences at word boundaries, scanned left
// to right with the longest phrase winning at each start. Occurrences lying
// inside an excluded phrase are never reported.
std::vector<MatchSpan> find_matches(std::string_view text, const SpellLexicon& lexicon, MatchMode mode);
std::vector<MatchSpan> find_matches(const Segment& segment, const SpellLexicon& lexicon, MatchMode mode);

struct SegmentLabel {
  bool positive = false;
  std::vector<MatchSpan> spans;
};

SegmentLabel label_segment(std::string_view text, const SpellLexicon& lexicon, MatchMode mode);
SegmentLabel label_segment(const Segment& segment, const SpellLexicon& lexicon, MatchMode mode);

}  // namespace spellscan
