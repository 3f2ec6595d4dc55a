#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spellscan/jsonl.hpp"

namespace spellscan {

class Vocabulary;

enum class DocumentRole { train, eval };

struct RawDocument {
  std::string doc_id;
  std::string text;  // normalized
  DocumentRole role = DocumentRole::train;
};

enum class SegmentKind { sentence, paragraph, packed };

struct Segment {
  std::string seg_id;  // doc_id:kind:ordinal
  std::string doc_id;
  SegmentKind kind = SegmentKind::sentence;
  std::string text;
  std::vector<int> sentence_indices;
  // A packed segment holding one sentence longer than the token budget.
  bool oversized = false;

  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class SplitVariant { sentence_split, paragraph_split, sequence_split };

struct SplitStrategy {
  SplitVariant variant = SplitVariant::sentence_split;
  int max_tokens = 384;  // sequence_split only

  void validate() const;
};

std::string_view to_string(SegmentKind kind);
std::string_view to_string(SplitVariant variant);
SplitVariant parse_split_variant(std::string_view name);  // sentence|paragraph|sequence

// Normalizes `raw` into a document; throws IngestError.
RawDocument make_document(std::string doc_id, std::string_view raw,
                          DocumentRole role = DocumentRole::train);

// Every *.txt file directly inside `dir`, sorted by file name; doc_id is the stem.
std::vector<RawDocument> load_documents(const std::filesystem::path& dir,
                                        DocumentRole role = DocumentRole::train);

// Abbreviations (with trailing period) that never end a sentence.
std::span<const std::string_view> sentence_abbreviations();

std::vector<Segment> split_sentences(const RawDocument& doc);
std::vector<Segment> split_paragraphs(const RawDocument& doc);

using TokenCounter = std::function<std::size_t(std::string_view)>;

// Greedy left-to-right packing of one document's sentences.
std::vector<Segment> pack_sequences(std::span<const Segment> sentences, int max_tokens,
                                    const TokenCounter& count_tokens);
std::vector<Segment> pack_sequences(std::span<const Segment> sentences, int max_tokens,
                                    const Vocabulary& vocab);

// `vocab` is required for sequence_split and ignored otherwise.
std::vector<Segment> segment_corpus(std::span<const RawDocument> docs, const SplitStrategy& strategy,
                                    const Vocabulary* vocab = nullptr);

Json segment_to_json(const Segment& seg);
Segment segment_from_json(const Json& record, std::size_t line = 0);
std::vector<Segment> segments_from_jsonl(const JsonlFile& file);
JsonlFile segments_to_jsonl(std::span<const Segment> segments);

// Fingerprint over seg_ids and texts; identifies the corpus a dataset came from.
std::string corpus_hash(std::span<const Segment> segments);

}  // namespace spellscan
