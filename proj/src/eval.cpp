#include "spellscan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "spellscan/errors.hpp"
#include "spellscan/text.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan {

std::string_view to_string(EvalTask task) {
  return task == EvalTask::sequence ? "sequence" : "token_softmatch";
}

EvalTask parse_eval_task(std::string_view name) {
  if (name == "sequence") return EvalTask::sequence;
  if (name == "token_softmatch" || name == "token") return EvalTask::token_softmatch;
  throw ConfigError("unknown evaluation task '" + std::string(name) + "'");
}

EvalReport f1_from_matrix(const ConfusionMatrix& m, EvalTask task) {
  if (m.tp < 0 || m.fp < 0 || m.fn < 0 || m.tn < 0) throw InputError("negative confusion matrix count");
  EvalReport r;
  r.matrix = m;
  r.task = task;
  const auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(m.tp, m.tp + m.fp);
  r.recall = ratio(m.tp, m.tp + m.fn);
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

std::string format_metric(double value) {
  // The tiny bias keeps decimal midpoints like 0.87055 from rounding down
  // after binary representation error.
  const double scaled = std::floor(value * 10000.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", scaled / 10000.0);
  return buf;
}

namespace {

std::string list_ids(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 20;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > kShown) out += ", ... (" + std::to_string(ids.size() - kShown) + " more)";
  return out;
}

// Pairs predictions with gold by seg_id; gold order is kept.
template <typename Pred, typename Gold>
std::vector<std::pair<const Pred*, const Gold*>> align(std::span<const Pred> preds, std::span<const Gold> gold) {
  std::unordered_map<std::string, const Pred*> by_id;
  std::vector<std::string> duplicate, missing, extra;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.seg_id, &p).second) duplicate.push_back(p.seg_id);
  }
  std::unordered_map<std::string, bool> gold_ids;
  std::vector<std::pair<const Pred*, const Gold*>> out;
  for (const auto& g : gold) {
    if (!gold_ids.emplace(g.seg_id, true).second) duplicate.push_back(g.seg_id);
    auto it = by_id.find(g.seg_id);
    if (it == by_id.end()) {
      missing.push_back(g.seg_id);
    } else {
      out.emplace_back(it->second, &g);
    }
  }
  for (const auto& p : preds) {
    if (!gold_ids.count(p.seg_id)) extra.push_back(p.seg_id);
  }
  if (!duplicate.empty() || !missing.empty() || !extra.empty()) {
    std::string msg = "predictions and gold are not aligned";
    if (!missing.empty()) msg += "; missing predictions: " + list_ids(missing);
    if (!extra.empty()) msg += "; predictions without gold: " + list_ids(extra);
    if (!duplicate.empty()) msg += "; duplicate ids: " + list_ids(duplicate);
    throw AlignmentError(msg);
  }
  return out;
}

void check_word_counts(const TokPrediction& p, const TokExample& g) {
  if (p.tags.size() != g.tags.size() || p.words.size() != p.tags.size()) {
    throw AlignmentError("word count mismatch for " + g.seg_id + ": predicted " + std::to_string(p.tags.size()) +
                         ", gold " + std::to_string(g.tags.size()));
  }
}

}  // namespace

EvalReport score_sequence_predictions(std::span<const SeqPrediction> preds, std::span<const SeqExample> gold) {
  ConfusionMatrix m;
  for (const auto& [p, g] : align(preds, gold)) {
    const bool pred_pos = p->label == Label::positive;
    const bool gold_pos = g->label == Label::positive;
    if (gold_pos) {
      (pred_pos ? m.tp : m.fn) += 1;
    } else {
      (pred_pos ? m.fp : m.tn) += 1;
    }
  }
  return f1_from_matrix(m, EvalTask::sequence);
}

EvalReport score_token_predictions_softmatch(std::span<const TokPrediction> preds, std::span<const TokExample> gold) {
  ConfusionMatrix m;
  for (const auto& [p, g] : align(preds, gold)) {
    check_word_counts(*p, *g);
    bool gold_pos = false, hit = false, any_pred = false;
    for (std::size_t i = 0; i < g->tags.size(); ++i) {
      const bool gold_span = g->tags[i] != Tag::O;
      const bool pred_span = p->tags[i] != Tag::O;
      gold_pos |= gold_span;
      hit |= gold_span && pred_span;
      any_pred |= pred_span;
    }
    if (gold_pos) {
      (hit ? m.tp : m.fn) += 1;
    } else {
      (any_pred ? m.fp : m.tn) += 1;
    }
  }
  return f1_from_matrix(m, EvalTask::token_softmatch);
}

std::vector<std::pair<std::size_t, std::size_t>> decode_spans(std::span<const Tag> tags) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == Tag::O) continue;
    if (tags[i] == Tag::B || i == 0 || tags[i - 1] == Tag::O) {
      spans.emplace_back(i, i + 1);
    } else {
      spans.back().second = i + 1;
    }
  }
  return spans;
}

ConfusionMatrix score_token_predictions_exact(std::span<const TokPrediction> preds, std::span<const TokExample> gold) {
  ConfusionMatrix m;
  for (const auto& [p, g] : align(preds, gold)) {
    check_word_counts(*p, *g);
    const auto gold_spans = decode_spans(g->tags);
    const auto pred_spans = decode_spans(p->tags);
    if (!gold_spans.empty()) {
      (gold_spans == pred_spans ? m.tp : m.fn) += 1;
    } else {
      (pred_spans.empty() ? m.tn : m.fp) += 1;
    }
  }
  return m;
}

ReferenceWordlist ReferenceWordlist::parse(std::string_view content) {
  ReferenceWordlist w;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty()) w.words.insert(to_lower(line));
    pos = nl + 1;
  }
  if (w.words.empty()) throw InputError("reference wordlist is empty");
  return w;
}

ReferenceWordlist ReferenceWordlist::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void ReferenceWordlist::add(std::span<const std::string> extra) {
  for (const auto& e : extra) {
    if (!e.empty()) words.insert(to_lower(e));
  }
}

bool is_alphabetic_word(std::string_view word) {
  if (word.empty()) return false;
  for (std::size_t pos = 0; pos < word.size();) {
    const auto cp = decode_utf8(word, pos);
    if (!cp || !is_letter(cp->value)) return false;
    pos += cp->length;
  }
  return true;
}

bool baseline_flags(std::string_view text, const ReferenceWordlist& wordlist) {
  for (const Word& w : split_words(text)) {
    if (is_alphabetic_word(w.text) && !wordlist.contains(to_lower(w.text))) return true;
  }
  return false;
}

EvalReport dictionary_baseline(std::span<const Segment> segments, const ReferenceWordlist& wordlist,
                               const SpellLexicon& lexicon, MatchMode mode) {
  if (wordlist.words.empty()) throw InputError("reference wordlist is empty");
  ConfusionMatrix m;
  for (const Segment& seg : segments) {
    const bool gold = label_segment(seg, lexicon, mode).positive;
    const bool pred = baseline_flags(seg.text, wordlist);
    if (gold) {
      (pred ? m.tp : m.fn) += 1;
    } else {
      (pred ? m.fp : m.tn) += 1;
    }
  }
  return f1_from_matrix(m, EvalTask::sequence);
}

ReportDelta compare_reports(const EvalReport& a, const EvalReport& b) {
  ReportDelta d;
  d.precision = b.precision - a.precision;
  d.recall = b.recall - a.recall;
  d.f1 = b.f1 - a.f1;
  d.tp = b.matrix.tp - a.matrix.tp;
  d.fp = b.matrix.fp - a.matrix.fp;
  d.fn = b.matrix.fn - a.matrix.fn;
  d.tn = b.matrix.tn - a.matrix.tn;
  return d;
}

Json to_json(const ConfusionMatrix& m) {
  Json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["tn"] = m.tn;
  return j;
}

ConfusionMatrix confusion_matrix_from_json(const Json& j) {
  try {
    return ConfusionMatrix{j.at("tp").get<std::int64_t>(), j.at("fp").get<std::int64_t>(),
                           j.at("fn").get<std::int64_t>(), j.at("tn").get<std::int64_t>()};
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad confusion matrix: ") + e.what(), 0);
  }
}

Json report_to_json(const EvalReport& r) {
  Json j;
  j["task"] = to_string(r.task);
  j["matrix"] = to_json(r.matrix);
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["f1_display"] = format_metric(r.f1);
  j["config"] = r.config;
  return j;
}

EvalReport report_from_json(const Json& j) {
  try {
    EvalReport r;
    r.task = parse_eval_task(j.at("task").get<std::string>());
    r.matrix = confusion_matrix_from_json(j.at("matrix"));
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    if (j.contains("config")) r.config = j.at("config");
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad report: ") + e.what(), 0);
  }
}

Json delta_to_json(const ReportDelta& d) {
  Json j;
  j["precision"] = d.precision;
  j["recall"] = d.recall;
  j["f1"] = d.f1;
  j["matrix"] = {{"tp", d.tp}, {"fp", d.fp}, {"fn", d.fn}, {"tn", d.tn}};
  return j;
}

ReportDelta delta_from_json(const Json& j) {
  try {
    ReportDelta d;
    d.precision = j.at("precision").get<double>();
    d.recall = j.at("recall").get<double>();
    d.f1 = j.at("f1").get<double>();
    const auto m = confusion_matrix_from_json(j.at("matrix"));
    d.tp = m.tp;
    d.fp = m.fp;
    d.fn = m.fn;
    d.tn = m.tn;
    return d;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad report delta: ") + e.what(), 0);
  }
}

Json prediction_to_json(const SeqPrediction& p) {
  Json j;
  j["seg_id"] = p.seg_id;
  j["label"] = to_string(p.label);
  j["positive_probability"] = p.positive_probability;
  return j;
}

Json prediction_to_json(const TokPrediction& p) {
  Json j;
  j["seg_id"] = p.seg_id;
  j["words"] = p.words;
  Json tags = Json::array();
  for (Tag t : p.tags) tags.push_back(to_string(t));
  j["tags"] = std::move(tags);
  return j;
}

SeqPrediction seq_prediction_from_json(const Json& j, std::size_t line) {
  try {
    SeqPrediction p;
    p.seg_id = j.at("seg_id").get<std::string>();
    p.label = parse_label(j.at("label").get<std::string>());
    if (j.contains("positive_probability")) p.positive_probability = j.at("positive_probability").get<double>();
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad sequence prediction: ") + e.what(), line);
  } catch (const ConfigError& e) {
    throw FormatError(e.what(), line);
  }
}

TokPrediction tok_prediction_from_json(const Json& j, std::size_t line) {
  try {
    TokPrediction p;
    p.seg_id = j.at("seg_id").get<std::string>();
    p.words = j.at("words").get<std::vector<std::string>>();
    for (const auto& t : j.at("tags")) p.tags.push_back(parse_tag(t.get<std::string>()));
    if (p.words.size() != p.tags.size()) throw FormatError("words and tags differ in length", line);
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad token prediction: ") + e.what(), line);
  } catch (const ConfigError& e) {
    throw FormatError(e.what(), line);
  }
}

std::vector<SeqPrediction> seq_predictions_from_jsonl(const JsonlFile& file) {
  std::vector<SeqPrediction> out;
  std::size_t line = file.header ? 2 : 1;
  for (const auto& r : file.records) out.push_back(seq_prediction_from_json(r, line++));
  return out;
}

std::vector<TokPrediction> tok_predictions_from_jsonl(const JsonlFile& file) {
  std::vector<TokPrediction> out;
  std::size_t line = file.header ? 2 : 1;
  for (const auto& r : file.records) out.push_back(tok_prediction_from_json(r, line++));
  return out;
}

}  // namespace spellscan
