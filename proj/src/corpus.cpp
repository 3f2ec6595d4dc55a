#include "spellscan/corpus.hpp"

#include <algorithm>
#include <array>

#include "spellscan/errors.hpp"
#include "spellscan/hash.hpp"
#include "spellscan/text.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan {
namespace {

constexpr std::array<std::string_view, 40> kAbbreviations = {
    "mr.",   "mrs.",  "ms.",   "dr.",   "st.",   "prof.", "sr.",   "jr.",   "mt.",   "ft.",
    "lt.",   "col.",  "gen.",  "capt.", "sgt.",  "rev.",  "hon.",  "messrs.", "mme.", "mlle.",
    "etc.",  "vs.",   "e.g.",  "i.e.",  "cf.",   "no.",   "vol.",  "ch.",   "pp.",   "approx.",
    "jan.",  "feb.",  "aug.",  "sept.", "oct.",  "nov.",  "dec.",  "a.m.",  "p.m.",  "inc.",
};

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quote or bracket at pos; returns byte length (0 if none).
std::size_t closer_length(std::string_view s, std::size_t pos, bool& is_quote) {
  auto cp = decode_utf8(s, pos);
  if (!cp) return 0;
  switch (cp->value) {
    case '"':
    case '\'':
    case 0x201D:  // right double quotation mark
    case 0x2019:  // right single quotation mark
    case 0x00BB:  // right guillemet
      is_quote = true;
      return cp->length;
    case ')':
    case ']':
    case '}':
      return cp->length;
    default:
      return 0;
  }
}

bool is_opening_quote(std::string_view s, std::size_t pos) {
  auto cp = decode_utf8(s, pos);
  return cp && (cp->value == '"' || cp->value == 0x201C || cp->value == 0x2018 ||
                cp->value == 0x00AB || cp->value == '\'');
}

bool is_abbreviation(std::string_view paragraph, std::size_t period_pos) {
  // The token that ends with this period, back to whitespace or an opening bracket/quote.
  std::size_t begin = period_pos;
  while (begin > 0) {
    const std::size_t prev = previous_code_point(paragraph, begin);
    const char32_t cp = decode_utf8(paragraph, prev)->value;
    if (is_space(cp) || cp == '"' || cp == '(' || cp == '[' || cp == 0x201C || cp == 0x2018) break;
    begin = prev;
  }
  const std::string_view token = paragraph.substr(begin, period_pos + 1 - begin);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end()) {
    return true;
  }
  // Single-letter initials ("j. k. rowling").
  return token.size() == 2 && token[0] >= 'a' && token[0] <= 'z';
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

// Blank-line separated blocks with inner newlines joined by single spaces.
std::vector<std::string> paragraphs_of(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    if (line.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      if (!current.empty()) current += ' ';
      current += line;
    }
    pos = end + 1;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> sentences_of(std::string_view para) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < para.size()) {
    if (!is_terminal(para[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < para.size() && is_terminal(para[j])) ++j;
    std::size_t k = j;
    bool quoted = false;
    while (k < para.size()) {
      const std::size_t len = closer_length(para, k, quoted);
      if (len == 0) break;
      k += len;
    }
    if (k >= para.size()) break;
    if (!is_space(decode_utf8(para, k)->value)) {
      i = k;
      continue;
    }
    bool boundary = true;
    if (j - i == 1 && para[i] == '.' && k == j && is_abbreviation(para, i)) boundary = false;
    if (quoted) {
      // Dialogue: the attribution that follows a closing quote stays in the
      // same sentence unless a new quotation starts.
      std::size_t next = k;
      while (next < para.size() && is_space(decode_utf8(para, next)->value)) {
        next += decode_utf8(para, next)->length;
      }
      boundary = next < para.size() && is_opening_quote(para, next);
    }
    if (boundary) {
      std::string sentence = trim(para.substr(start, k - start));
      if (!sentence.empty()) out.push_back(std::move(sentence));
      start = k;
    }
    i = k;
  }
  std::string tail = trim(para.substr(start));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

std::string make_seg_id(const std::string& doc_id, SegmentKind kind, std::size_t ordinal) {
  return doc_id + ":" + std::string(to_string(kind)) + ":" + std::to_string(ordinal);
}

}  // namespace

void SplitStrategy::validate() const {
  if (variant == SplitVariant::sequence_split && max_tokens < 8) {
    throw ConfigError("max_tokens must be at least 8, got " + std::to_string(max_tokens));
  }
}

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::sentence: return "sentence";
    case SegmentKind::paragraph: return "paragraph";
    case SegmentKind::packed: return "packed";
  }
  return "";
}

std::string_view to_string(SplitVariant variant) {
  switch (variant) {
    case SplitVariant::sentence_split: return "sentence";
    case SplitVariant::paragraph_split: return "paragraph";
    case SplitVariant::sequence_split: return "sequence";
  }
  return "";
}

SplitVariant parse_split_variant(std::string_view name) {
  if (name == "sentence") return SplitVariant::sentence_split;
  if (name == "paragraph") return SplitVariant::paragraph_split;
  if (name == "sequence") return SplitVariant::sequence_split;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

RawDocument make_document(std::string doc_id, std::string_view raw, DocumentRole role) {
  return RawDocument{std::move(doc_id), normalize_text(raw), role};
}

std::vector<RawDocument> load_documents(const std::filesystem::path& dir, DocumentRole role) {
  if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  for (const auto& f : files) {
    try {
      docs.push_back(make_document(f.stem().string(), read_file(f), role));
    } catch (const IngestError& e) {
      throw IngestError(f.string() + ": " + e.what(), e.byte_offset());
    }
  }
  return docs;
}

std::span<const std::string_view> sentence_abbreviations() { return kAbbreviations; }

std::vector<Segment> split_sentences(const RawDocument& doc) {
  std::vector<Segment> out;
  for (const auto& para : paragraphs_of(doc.text)) {
    for (auto& sentence : sentences_of(para)) {
      const int ordinal = static_cast<int>(out.size());
      out.push_back(Segment{make_seg_id(doc.doc_id, SegmentKind::sentence, out.size()), doc.doc_id,
                            SegmentKind::sentence, std::move(sentence), {ordinal}, false});
    }
  }
  return out;
}

std::vector<Segment> split_paragraphs(const RawDocument& doc) {
  std::vector<Segment> out;
  int sentence_base = 0;
  for (auto& para : paragraphs_of(doc.text)) {
    const int n = static_cast<int>(sentences_of(para).size());
    std::vector<int> indices(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = sentence_base + i;
    sentence_base += n;
    out.push_back(Segment{make_seg_id(doc.doc_id, SegmentKind::paragraph, out.size()), doc.doc_id,
                          SegmentKind::paragraph, std::move(para), std::move(indices), false});
  }
  return out;
}

std::vector<Segment> pack_sequences(std::span<const Segment> sentences, int max_tokens,
                                    const TokenCounter& count_tokens) {
  if (max_tokens < 8) throw ConfigError("max_tokens must be at least 8");
  std::vector<Segment> packs;
  Segment current;
  std::size_t current_tokens = 0;
  const auto budget = static_cast<std::size_t>(max_tokens);

  std::size_t ordinal = 0;  // restarts with every document
  auto close = [&] {
    if (current.sentence_indices.empty()) return;
    if (!packs.empty() && packs.back().doc_id != current.doc_id) ordinal = 0;
    current.kind = SegmentKind::packed;
    current.seg_id = make_seg_id(current.doc_id, SegmentKind::packed, ordinal++);
    packs.push_back(std::move(current));
    current = Segment{};
    current_tokens = 0;
  };

  for (const auto& s : sentences) {
    if (!current.sentence_indices.empty() && s.doc_id != current.doc_id) close();
    const std::size_t n = count_tokens(s.text);
    if (!current.sentence_indices.empty() && current_tokens + n > budget) close();
    if (current.sentence_indices.empty()) {
      current.doc_id = s.doc_id;
      current.text = s.text;
      current.sentence_indices = s.sentence_indices;
      current_tokens = n;
      if (n > budget) {
        current.oversized = true;
        close();
      }
      continue;
    }
    current.text += ' ';
    current.text += s.text;
    current.sentence_indices.insert(current.sentence_indices.end(), s.sentence_indices.begin(),
                                    s.sentence_indices.end());
    current_tokens += n;
  }
  close();
  return packs;
}

std::vector<Segment> pack_sequences(std::span<const Segment> sentences, int max_tokens,
                                    const Vocabulary& vocab) {
  return pack_sequences(sentences, max_tokens,
                        [&vocab](std::string_view text) { return count_tokens(text, vocab); });
}

std::vector<Segment> segment_corpus(std::span<const RawDocument> docs, const SplitStrategy& strategy,
                                    const Vocabulary* vocab) {
  strategy.validate();
  std::vector<Segment> out;
  for (const auto& doc : docs) {
    std::vector<Segment> part;
    switch (strategy.variant) {
      case SplitVariant::sentence_split:
        part = split_sentences(doc);
        break;
      case SplitVariant::paragraph_split:
        part = split_paragraphs(doc);
        break;
      case SplitVariant::sequence_split:
        if (vocab == nullptr) throw ConfigError("sequence split requires a vocabulary");
        part = pack_sequences(split_sentences(doc), strategy.max_tokens, *vocab);
        break;
    }
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

Json segment_to_json(const Segment& seg) {
  Json j;
  j["seg_id"] = seg.seg_id;
  j["doc_id"] = seg.doc_id;
  j["kind"] = to_string(seg.kind);
  j["text"] = seg.text;
  j["sentence_indices"] = seg.sentence_indices;
  if (seg.oversized) j["oversized"] = true;
  return j;
}

Segment segment_from_json(const Json& r, std::size_t line) {
  try {
    Segment seg;
    seg.seg_id = r.at("seg_id").get<std::string>();
    seg.doc_id = r.at("doc_id").get<std::string>();
    const auto kind = r.at("kind").get<std::string>();
    if (kind == "sentence") {
      seg.kind = SegmentKind::sentence;
    } else if (kind == "paragraph") {
      seg.kind = SegmentKind::paragraph;
    } else if (kind == "packed") {
      seg.kind = SegmentKind::packed;
    } else {
      throw FormatError("unknown segment kind '" + kind + "'", line);
    }
    seg.text = r.at("text").get<std::string>();
    seg.sentence_indices = r.at("sentence_indices").get<std::vector<int>>();
    seg.oversized = r.value("oversized", false);
    return seg;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad segment record: ") + e.what(), line);
  }
}

std::vector<Segment> segments_from_jsonl(const JsonlFile& file) {
  std::vector<Segment> out;
  out.reserve(file.records.size());
  std::size_t line = file.header ? 2 : 1;
  for (const auto& r : file.records) out.push_back(segment_from_json(r, line++));
  return out;
}

JsonlFile segments_to_jsonl(std::span<const Segment> segments) {
  JsonlFile file;
  file.records.reserve(segments.size());
  for (const auto& s : segments) file.records.push_back(segment_to_json(s));
  return file;
}

std::string corpus_hash(std::span<const Segment> segments) {
  Fnv1a h;
  for (const auto& s : segments) {
    h.update(s.seg_id);
    h.update("\t");
    h.update(s.text);
    h.update("\n");
  }
  return h.hex();
}

}  // namespace spellscan
