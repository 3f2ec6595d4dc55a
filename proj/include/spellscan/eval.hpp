#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spellscan/corpus.hpp"
#include "spellscan/dataset.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/spellbook.hpp"

namespace spellscan {

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

enum class EvalTask { sequence, token_softmatch };
std::string_view to_string(EvalTask task);
EvalTask parse_eval_task(std::string_view name);

struct EvalReport {
  ConfusionMatrix matrix;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  EvalTask task = EvalTask::sequence;
  Json config = Json::object();
};

// Zero denominators give zero precision, recall and F1.
EvalReport f1_from_matrix(const ConfusionMatrix& m, EvalTask task = EvalTask::sequence);

// Four decimals, half-up, e.g. "0.8705".
std::string format_metric(double value);

struct SeqPrediction {
  std::string seg_id;
  Label label = Label::negative;
  double positive_probability = 0;

  friend bool operator==(const SeqPrediction&, const SeqPrediction&) = default;
};

struct TokPrediction {
  std::string seg_id;
  std::vector<std::string> words;
  std::vector<Tag> tags;

  friend bool operator==(const TokPrediction&, const TokPrediction&) = default;
};

// Both throw AlignmentError when the seg_id sets differ (the message lists
// the ids) or, for tokens, when a pair disagrees on word count.
EvalReport score_sequence_predictions(std::span<const SeqPrediction> preds, std::span<const SeqExample> gold);
EvalReport score_token_predictions_softmatch(std::span<const TokPrediction> preds, std::span<const TokExample> gold);

// Stricter reference scorer: a gold-positive sequence is a TP only when the
// predicted spans equal the gold spans exactly.
ConfusionMatrix score_token_predictions_exact(std::span<const TokPrediction> preds, std::span<const TokExample> gold);

// Spans [first, last) decoded from IOB tags; a stray I opens a new span.
std::vector<std::pair<std::size_t, std::size_t>> decode_spans(std::span<const Tag> tags);

struct ReferenceWordlist {
  std::set<std::string> words;

  // Lowercases, drops blank lines; throws InputError when nothing remains.
  static ReferenceWordlist parse(std::string_view content);
  static ReferenceWordlist load(const std::filesystem::path& path);
  void add(std::span<const std::string> extra);
  bool contains(std::string_view word) const { return words.count(std::string(word)) > 0; }
};

// True when the word consists of letters only (no digits or punctuation).
bool is_alphabetic_word(std::string_view word);

// Out-of-wordlist novelty detection: a segment is flagged positive when it
// contains an alphabetic word missing from the wordlist.
bool baseline_flags(std::string_view text, const ReferenceWordlist& wordlist);
EvalReport dictionary_baseline(std::span<const Segment> segments, const ReferenceWordlist& wordlist,
                               const SpellLexicon& lexicon, MatchMode mode);

struct ReportDelta {
  double precision = 0;  // b - a
  double recall = 0;
  double f1 = 0;
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  friend bool operator==(const ReportDelta&, const ReportDelta&) = default;
};

ReportDelta compare_reports(const EvalReport& a, const EvalReport& b);

Json to_json(const ConfusionMatrix& m);
ConfusionMatrix confusion_matrix_from_json(const Json& j);
Json report_to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);
Json delta_to_json(const ReportDelta& delta);
ReportDelta delta_from_json(const Json& j);

Json prediction_to_json(const SeqPrediction& p);
Json prediction_to_json(const TokPrediction& p);
SeqPrediction seq_prediction_from_json(const Json& j, std::size_t line = 0);
TokPrediction tok_prediction_from_json(const Json& j, std::size_t line = 0);
std::vector<SeqPrediction> seq_predictions_from_jsonl(const JsonlFile& file);
std::vector<TokPrediction> tok_predictions_from_jsonl(const JsonlFile& file);

}  // namespace spellscan
