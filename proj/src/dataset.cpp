#include "spellscan/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "spellscan/errors.hpp"
#include "spellscan/random.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan {
namespace {

struct Labeled {
  std::size_t index;  // into segments
  bool positive;
  std::vector<MatchSpan> spans;
};

struct Selection {
  std::vector<Labeled> train;
  std::vector<Labeled> dev;
  DatasetCounts counts;
};

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

// Negative sampling, shuffling and the per-label train/dev split shared by
// both tasks. One generator drives every random choice, in a fixed order.
Selection select_examples(std::span<const Segment> segments, const SpellLexicon& lexicon,
                          const BuildConfig& cfg) {
  cfg.validate();
  std::vector<Labeled> positives;
  std::vector<Labeled> negatives;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto label = label_segment(segments[i], lexicon, cfg.mode);
    (label.positive ? positives : negatives).push_back(Labeled{i, label.positive, std::move(label.spans)});
  }
  if (positives.empty()) throw BuildError("empty positive class");

  Rng rng(cfg.seed);
  const std::size_t wanted = positives.size() * static_cast<std::size_t>(cfg.neg_ratio);
  const std::size_t take = std::min(wanted, negatives.size());
  // Partial Fisher-Yates: the first `take` slots become a uniform sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(negatives.size() - i));
    std::swap(negatives[i], negatives[j]);
  }
  negatives.resize(take);

  std::vector<Labeled> all = std::move(positives);
  const std::size_t n_pos = all.size();
  all.insert(all.end(), std::make_move_iterator(negatives.begin()), std::make_move_iterator(negatives.end()));
  rng.shuffle(all);

  auto dev_quota = [&cfg](std::size_t n) {
    std::size_t d = round_half_up(cfg.dev_fraction * static_cast<double>(n));
    if (cfg.dev_fraction > 0.0 && n >= 2) d = std::clamp<std::size_t>(d, 1, n - 1);
    return std::min(d, n);
  };
  std::size_t dev_left[2] = {dev_quota(take), dev_quota(n_pos)};

  Selection sel;
  sel.counts.positives = n_pos;
  sel.counts.negatives = take;
  for (auto& ex : all) {
    auto& quota = dev_left[ex.positive ? 1 : 0];
    if (quota > 0) {
      --quota;
      sel.dev.push_back(std::move(ex));
    } else {
      sel.train.push_back(std::move(ex));
    }
  }
  sel.counts.train = sel.train.size();
  sel.counts.dev = sel.dev.size();
  return sel;
}

DatasetManifest make_manifest(Task task, const Selection& sel, std::span<const Segment> segments,
                              const SpellLexicon& lexicon, const BuildConfig& cfg) {
  DatasetManifest m;
  m.task = task;
  m.counts = sel.counts;
  m.config = cfg;
  m.lexicon_hash = lexicon.hash();
  m.corpus_hash = corpus_hash(segments);
  return m;
}

}  // namespace

std::string_view to_string(Label label) { return label == Label::positive ? "positive" : "negative"; }

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::O: return "O";
    case Tag::B: return "B";
    case Tag::I: return "I";
  }
  return "";
}

Label parse_label(std::string_view name) {
  if (name == "positive") return Label::positive;
  if (name == "negative") return Label::negative;
  throw ConfigError("unknown label '" + std::string(name) + "'");
}

Tag parse_tag(std::string_view name) {
  if (name == "O") return Tag::O;
  if (name == "B") return Tag::B;
  if (name == "I") return Tag::I;
  throw ConfigError("unknown tag '" + std::string(name) + "'");
}

std::string_view to_string(Task task) { return task == Task::sequence ? "sequence" : "token"; }

Task parse_task(std::string_view name) {
  if (name == "sequence") return Task::sequence;
  if (name == "token") return Task::token;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

void BuildConfig::validate() const {
  if (neg_ratio < 0) throw ConfigError("neg_ratio must be non-negative");
  if (!(dev_fraction >= 0.0 && dev_fraction < 1.0)) throw ConfigError("dev_fraction must be in [0,1)");
  strategy.validate();
}

Json manifest_to_json(const DatasetManifest& m) {
  Json j;
  j["task"] = to_string(m.task);
  j["counts"] = {{"positives", m.counts.positives},
                 {"negatives", m.counts.negatives},
                 {"train", m.counts.train},
                 {"dev", m.counts.dev}};
  j["config"] = {{"mode", to_string(m.config.mode)},
                 {"neg_ratio", m.config.neg_ratio},
                 {"dev_fraction", m.config.dev_fraction},
                 {"seed", m.config.seed},
                 {"split", to_string(m.config.strategy.variant)},
                 {"max_tokens", m.config.strategy.max_tokens}};
  j["lexicon_hash"] = m.lexicon_hash;
  j["corpus_hash"] = m.corpus_hash;
  j["generator"] = m.generator;
  j["stratified"] = m.stratified;
  return j;
}

DatasetManifest manifest_from_json(const Json& j) {
  try {
    DatasetManifest m;
    m.task = parse_task(j.at("task").get<std::string>());
    const auto& c = j.at("counts");
    m.counts = {c.at("positives").get<std::size_t>(), c.at("negatives").get<std::size_t>(),
                c.at("train").get<std::size_t>(), c.at("dev").get<std::size_t>()};
    const auto& cfg = j.at("config");
    m.config.mode = parse_match_mode(cfg.at("mode").get<std::string>());
    m.config.neg_ratio = cfg.at("neg_ratio").get<int>();
    m.config.dev_fraction = cfg.at("dev_fraction").get<double>();
    m.config.seed = cfg.at("seed").get<std::uint64_t>();
    m.config.strategy.variant = parse_split_variant(cfg.at("split").get<std::string>());
    m.config.strategy.max_tokens = cfg.at("max_tokens").get<int>();
    m.lexicon_hash = j.at("lexicon_hash").get<std::string>();
    m.corpus_hash = j.at("corpus_hash").get<std::string>();
    m.generator = j.value("generator", "mt19937_64");
    m.stratified = j.value("stratified", true);
    return m;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what(), 1);
  }
}

TokExample tag_words(std::string seg_id, std::string_view text, std::span<const MatchSpan> spans) {
  TokExample ex;
  ex.seg_id = std::move(seg_id);
  const auto words = split_words(text);
  ex.words.reserve(words.size());
  ex.tags.assign(words.size(), Tag::O);
  for (const auto& w : words) ex.words.push_back(w.text);
  for (const auto& span : spans) {
    bool first = true;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i].end <= span.start || words[i].start >= span.end) continue;
      ex.tags[i] = first ? Tag::B : Tag::I;
      first = false;
    }
  }
  return ex;
}

DatasetSplit<SeqExample> build_sequence_dataset(std::span<const Segment> segments,
                                                const SpellLexicon& lexicon, const BuildConfig& cfg) {
  Selection sel = select_examples(segments, lexicon, cfg);
  DatasetSplit<SeqExample> out;
  auto convert = [&](const Labeled& l) {
    const auto& s = segments[l.index];
    return SeqExample{s.seg_id, s.text, l.positive ? Label::positive : Label::negative};
  };
  for (const auto& l : sel.train) out.train.push_back(convert(l));
  for (const auto& l : sel.dev) out.dev.push_back(convert(l));
  out.manifest = make_manifest(Task::sequence, sel, segments, lexicon, cfg);
  return out;
}

DatasetSplit<TokExample> build_token_dataset(std::span<const Segment> segments,
                                             const SpellLexicon& lexicon, const BuildConfig& cfg) {
  Selection sel = select_examples(segments, lexicon, cfg);
  DatasetSplit<TokExample> out;
  auto convert = [&](const Labeled& l) {
    const auto& s = segments[l.index];
    return tag_words(s.seg_id, s.text, l.spans);
  };
  for (const auto& l : sel.train) out.train.push_back(convert(l));
  for (const auto& l : sel.dev) out.dev.push_back(convert(l));
  out.manifest = make_manifest(Task::token, sel, segments, lexicon, cfg);
  return out;
}

std::vector<SeqExample> build_eval_dataset(std::span<const Segment> segments,
                                           const SpellLexicon& lexicon, MatchMode mode) {
  std::vector<SeqExample> out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    const bool positive = label_segment(s, lexicon, mode).positive;
    out.push_back(SeqExample{s.seg_id, s.text, positive ? Label::positive : Label::negative});
  }
  return out;
}

std::vector<TokExample> build_token_eval_dataset(std::span<const Segment> segments,
                                                 const SpellLexicon& lexicon, MatchMode mode) {
  std::vector<TokExample> out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    const auto spans = find_matches(s, lexicon, mode);
    out.push_back(tag_words(s.seg_id, s.text, spans));
  }
  return out;
}

Json example_to_json(const SeqExample& e) {
  Json j;
  j["seg_id"] = e.seg_id;
  j["text"] = e.text;
  j["label"] = to_string(e.label);
  return j;
}

Json example_to_json(const TokExample& e) {
  Json j;
  j["seg_id"] = e.seg_id;
  j["words"] = e.words;
  Json tags = Json::array();
  for (Tag t : e.tags) tags.push_back(to_string(t));
  j["tags"] = std::move(tags);
  return j;
}

SeqExample seq_example_from_json(const Json& j, std::size_t line) {
  try {
    return SeqExample{j.at("seg_id").get<std::string>(), j.at("text").get<std::string>(),
                      parse_label(j.at("label").get<std::string>())};
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad sequence example: ") + e.what(), line);
  } catch (const ConfigError& e) {
    throw FormatError(e.what(), line);
  }
}

TokExample tok_example_from_json(const Json& j, std::size_t line) {
  try {
    TokExample ex;
    ex.seg_id = j.at("seg_id").get<std::string>();
    ex.words = j.at("words").get<std::vector<std::string>>();
    for (const auto& t : j.at("tags")) ex.tags.push_back(parse_tag(t.get<std::string>()));
    if (ex.words.size() != ex.tags.size()) throw FormatError("words and tags differ in length", line);
    return ex;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad token example: ") + e.what(), line);
  } catch (const ConfigError& e) {
    throw FormatError(e.what(), line);
  }
}

namespace {

template <typename Example>
void export_examples(std::span<const Example> examples, const std::filesystem::path& path,
                     const std::optional<Json>& header) {
  JsonlFile file;
  file.header = header;
  file.records.reserve(examples.size());
  for (const auto& e : examples) file.records.push_back(example_to_json(e));
  write_jsonl(path, file);
}

}  // namespace

void export_dataset(std::span<const SeqExample> examples, const std::filesystem::path& path,
                    const std::optional<Json>& header) {
  export_examples(examples, path, header);
}

void export_dataset(std::span<const TokExample> examples, const std::filesystem::path& path,
                    const std::optional<Json>& header) {
  export_examples(examples, path, header);
}

std::vector<SeqExample> seq_examples_from_jsonl(const JsonlFile& file) {
  std::vector<SeqExample> out;
  std::size_t line = file.header ? 2 : 1;
  for (const auto& r : file.records) out.push_back(seq_example_from_json(r, line++));
  return out;
}

std::vector<TokExample> tok_examples_from_jsonl(const JsonlFile& file) {
  std::vector<TokExample> out;
  std::size_t line = file.header ? 2 : 1;
  for (const auto& r : file.records) out.push_back(tok_example_from_json(r, line++));
  return out;
}

std::vector<SeqExample> import_seq_dataset(const std::filesystem::path& path) {
  return seq_examples_from_jsonl(read_jsonl(path));
}

std::vector<TokExample> import_tok_dataset(const std::filesystem::path& path) {
  return tok_examples_from_jsonl(read_jsonl(path));
}

}  // namespace spellscan
