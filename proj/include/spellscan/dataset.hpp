#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spellscan/corpus.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/spellbook.hpp"

namespace spellscan {

enum class Label { negative = 0, positive = 1 };

// Word tags; the numeric value is the class index used by the token head.
enum class Tag { O = 0, B = 1, I = 2 };

std::string_view to_string(Label label);
std::string_view to_string(Tag tag);
Label parse_label(std::string_view name);
Tag parse_tag(std::string_view name);

enum class Task { sequence, token };
std::string_view to_string(Task task);
Task parse_task(std::string_view name);

struct SeqExample {
  std::string seg_id;
  std::string text;
  Label label = Label::negative;

  friend bool operator==(const SeqExample&, const SeqExample&) = default;
};

struct TokExample {
  std::string seg_id;
  std::vector<std::string> words;
  std::vector<Tag> tags;

  friend bool operator==(const TokExample&, const TokExample&) = default;
};

struct BuildConfig {
  MatchMode mode = MatchMode::combined;
  int neg_ratio = 10;
  double dev_fraction = 0.2;
  std::uint64_t seed = 42;
  SplitStrategy strategy;

  void validate() const;
};

struct DatasetCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t train = 0;
  std::size_t dev = 0;
};

struct DatasetManifest {
  Task task = Task::sequence;
  DatasetCounts counts;
  BuildConfig config;
  std::string lexicon_hash;
  std::string corpus_hash;
  std::string generator = "mt19937_64";
  bool stratified = true;
};

Json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const Json& j);

template <typename Example>
struct DatasetSplit {
  std::vector<Example> train;
  std::vector<Example> dev;
  DatasetManifest manifest;
};

// Word-level IOB tags for a text: first word of each span B, the rest I.
TokExample tag_words(std::string seg_id, std::string_view text, std::span<const MatchSpan> spans);

// All positives, min(neg_ratio * positives, available) sampled negatives,
// shuffled and split per label. Throws BuildError without positives.
DatasetSplit<SeqExample> build_sequence_dataset(std::span<const Segment> segments,
                                                const SpellLexicon& lexicon, const BuildConfig& cfg);
DatasetSplit<TokExample> build_token_dataset(std::span<const Segment> segments,
                                             const SpellLexicon& lexicon, const BuildConfig& cfg);

// Every segment, labeled, in corpus order.
std::vector<SeqExample> build_eval_dataset(std::span<const Segment> segments,
                                           const SpellLexicon& lexicon, MatchMode mode);
std::vector<TokExample> build_token_eval_dataset(std::span<const Segment> segments,
                                                 const SpellLexicon& lexicon, MatchMode mode);

Json example_to_json(const SeqExample& e);
Json example_to_json(const TokExample& e);
SeqExample seq_example_from_json(const Json& j, std::size_t line = 0);
TokExample tok_example_from_json(const Json& j, std::size_t line = 0);

void export_dataset(std::span<const SeqExample> examples, const std::filesystem::path& path,
                    const std::optional<Json>& header = std::nullopt);
void export_dataset(std::span<const TokExample> examples, const std::filesystem::path& path,
                    const std::optional<Json>& header = std::nullopt);
std::vector<SeqExample> import_seq_dataset(const std::filesystem::path& path);
std::vector<TokExample> import_tok_dataset(const std::filesystem::path& path);
std::vector<SeqExample> seq_examples_from_jsonl(const JsonlFile& file);
std::vector<TokExample> tok_examples_from_jsonl(const JsonlFile& file);

}  // namespace spellscan
