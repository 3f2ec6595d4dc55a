#include "spellscan/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>

#include <CLI11.hpp>

#include "spellscan/attribution.hpp"
#include "spellscan/corpus.hpp"
#include "spellscan/dataset.hpp"
#include "spellscan/errors.hpp"
#include "spellscan/eval.hpp"
#include "spellscan/hash.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/model/checkpoint.hpp"
#include "spellscan/spellbook.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan {

namespace fs = std::filesystem;
using namespace model;

namespace {

// Files are echoed by name and content hash rather than path, so reruns in
// different directories still produce byte-identical artifacts.
Json file_ref(const std::string& path) {
  return Json{{"name", fs::path(path).filename().string()}, {"fnv1a", fnv1a_hex(read_file(path))}};
}

Json artifact_header(std::string_view command, Json config) {
  Json h;
  h["command"] = command;
  h["config"] = std::move(config);
  return h;
}

struct SegmentFile {
  std::vector<Segment> segments;
  std::string corpus_hash;
  std::optional<Json> header;
};

SegmentFile load_segments(const std::string& path) {
  JsonlFile file = read_jsonl(path);
  SegmentFile out;
  out.segments = segments_from_jsonl(file);
  out.header = file.header;
  out.corpus_hash = file.header && file.header->contains("corpus_hash")
                        ? file.header->at("corpus_hash").get<std::string>()
                        : corpus_hash(out.segments);
  return out;
}

void write_json(const std::string& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

// ---- ingest ---------------------------------------------------------------

struct IngestOptions {
  std::string input, out, split = "sentence", vocab;
  int max_tokens = 384;
};

void cmd_ingest(const IngestOptions& o, std::ostream& out) {
  SplitStrategy strategy{parse_split_variant(o.split), o.max_tokens};
  strategy.validate();
  std::optional<Vocabulary> vocab;
  if (!o.vocab.empty()) vocab = load_vocab(o.vocab);
  if (strategy.variant == SplitVariant::sequence_split && !vocab) {
    throw UsageError("--vocab is required for --split sequence");
  }
  const auto docs = load_documents(o.input);
  if (docs.empty()) throw InputError("no .txt documents in " + o.input);
  const auto segments = segment_corpus(docs, strategy, vocab ? &*vocab : nullptr);

  JsonlFile file = segments_to_jsonl(segments);
  Json config{{"input", fs::path(o.input).filename().string()},
              {"split", to_string(strategy.variant)},
              {"max_tokens", strategy.max_tokens},
              {"vocab", vocab ? file_ref(o.vocab) : Json(nullptr)}};
  Json header = artifact_header("ingest", std::move(config));
  header["documents"] = docs.size();
  header["segments"] = segments.size();
  header["corpus_hash"] = corpus_hash(segments);
  file.header = std::move(header);
  write_jsonl(o.out, file);
  out << "ingested " << docs.size() << " documents into " << segments.size() << " segments\n";
}

// ---- build ----------------------------------------------------------------

struct BuildOptions {
  std::string segments, lexicon, mode = "combined", task = "sequence", out;
  int neg_ratio = 10;
  std::uint64_t seed = 42;
  bool eval = false;
};

void cmd_build(const BuildOptions& o, std::ostream& out) {
  const SegmentFile seg = load_segments(o.segments);
  const SpellLexicon lexicon = load_lexicon(o.lexicon);
  BuildConfig cfg;
  cfg.mode = parse_match_mode(o.mode);
  cfg.neg_ratio = o.neg_ratio;
  cfg.seed = o.seed;
  if (seg.header && seg.header->contains("config")) {
    const Json& c = seg.header->at("config");
    cfg.strategy.variant = parse_split_variant(c.value("split", "sentence"));
    cfg.strategy.max_tokens = c.value("max_tokens", cfg.strategy.max_tokens);
  }
  cfg.validate();
  const Task task = parse_task(o.task);

  Json config{{"segments", file_ref(o.segments)}, {"lexicon", file_ref(o.lexicon)}, {"mode", to_string(cfg.mode)},
              {"task", to_string(task)},          {"neg_ratio", cfg.neg_ratio},     {"seed", cfg.seed},
              {"eval", o.eval}};
  Json header = artifact_header("build", std::move(config));
  header["corpus_hash"] = seg.corpus_hash;
  const fs::path dir = o.out;

  if (o.eval) {
    // Gold labels for every segment, for scoring predictions on a held-out corpus.
    std::size_t positives = 0, total = 0;
    if (task == Task::sequence) {
      const auto examples = build_eval_dataset(seg.segments, lexicon, cfg.mode);
      for (const auto& e : examples) positives += e.label == Label::positive;
      total = examples.size();
      export_dataset(examples, dir / "eval.jsonl", header);
    } else {
      const auto examples = build_token_eval_dataset(seg.segments, lexicon, cfg.mode);
      for (const auto& e : examples) positives += std::any_of(e.tags.begin(), e.tags.end(), [](Tag t) { return t != Tag::O; });
      total = examples.size();
      export_dataset(examples, dir / "eval.jsonl", header);
    }
    Json manifest = header;
    manifest["counts"] = {{"all", total}, {"positives", positives}};
    manifest["lexicon_hash"] = lexicon.hash();
    write_json((dir / "manifest.json").string(), manifest);
    out << "eval set: " << total << " segments, " << positives << " positive\n";
    return;
  }

  DatasetManifest manifest;
  if (task == Task::sequence) {
    auto split = build_sequence_dataset(seg.segments, lexicon, cfg);
    manifest = split.manifest;
    header["manifest"] = manifest_to_json(manifest);
    export_dataset(split.train, dir / "train.jsonl", header);
    export_dataset(split.dev, dir / "dev.jsonl", header);
  } else {
    auto split = build_token_dataset(seg.segments, lexicon, cfg);
    manifest = split.manifest;
    header["manifest"] = manifest_to_json(manifest);
    export_dataset(split.train, dir / "train.jsonl", header);
    export_dataset(split.dev, dir / "dev.jsonl", header);
  }
  // Datasets built from an ingest file hash the same segments, so this
  // matches the segment file's corpus hash.
  Json m = manifest_to_json(manifest);
  m["source"] = header["config"];
  write_json((dir / "manifest.json").string(), m);
  out << "dataset: " << manifest.counts.positives << " positives, " << manifest.counts.negatives
      << " negatives, " << manifest.counts.train << " train, " << manifest.counts.dev << " dev\n";
}

// ---- extend-vocab ---------------------------------------------------------

struct ExtendOptions {
  std::string vocab, lexicon, out;
};

void cmd_extend_vocab(const ExtendOptions& o, std::ostream& out) {
  const Vocabulary base = load_vocab(o.vocab);
  const SpellLexicon lexicon = load_lexicon(o.lexicon);
  const VocabExtension ext = extend_vocab(base, lexicon);
  save_vocab(ext.vocab, o.out);
  // The vocabulary file format has no room for metadata, so the config echo
  // goes to stdout.
  Json echo = artifact_header("extend-vocab", Json{{"vocab", file_ref(o.vocab)}, {"lexicon", file_ref(o.lexicon)}});
  echo["added"] = ext.added;
  echo["size"] = ext.vocab.size();
  echo["vocab_hash"] = ext.vocab.hash();
  out << echo.dump() << "\n";
}

// ---- train ----------------------------------------------------------------

struct TrainOptions {
  std::string dataset, vocab, model_config, out;
  int epochs = 5;
  int batch = 16;
  double lr = 1e-3;
  std::uint64_t seed = 42;
};

struct StudyModel {
  ModelConfig model;
  Pooling pooling = Pooling::cls;
  int max_len = 128;
};

StudyModel parse_model_config(const std::string& path) {
  StudyModel s;
  if (path.empty()) return s;
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  static const std::vector<std::string> kKeys = {"layers", "hidden",   "heads",   "ffn",     "max_positions",
                                                 "dropout", "pooling", "max_len", "vocab_size", "bag_of_embeddings"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ConfigError("unknown model config key '" + key + "'");
    }
  }
  s.model = model_config_from_json(j);
  try {
    s.max_len = j.value("max_len", s.max_len);
    s.pooling = parse_pooling(j.value("pooling", std::string("cls")));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  if (!j.contains("max_positions")) s.model.max_positions = std::max(s.model.max_positions, s.max_len);
  return s;
}

void cmd_train(const TrainOptions& o, std::ostream& out) {
  const fs::path dir = o.dataset;
  const DatasetManifest manifest = manifest_from_json(Json::parse(read_file(dir / "manifest.json")));
  const Vocabulary vocab = load_vocab(o.vocab);
  StudyModel study = parse_model_config(o.model_config);
  if (study.model.vocab_size != 0 && study.model.vocab_size != static_cast<int>(vocab.size())) {
    throw UsageError("model config vocab_size " + std::to_string(study.model.vocab_size) +
                     " contradicts the vocabulary size " + std::to_string(vocab.size()));
  }
  study.model.vocab_size = static_cast<int>(vocab.size());
  TrainConfig tcfg;
  tcfg.epochs = o.epochs;
  tcfg.batch_size = o.batch;
  tcfg.learning_rate = o.lr;
  tcfg.seed = o.seed;
  tcfg.max_len = study.max_len;
  tcfg.validate();

  Checkpoint ckpt;
  ckpt.model = study.model;
  ckpt.head = HeadConfig{manifest.task, study.pooling};
  ckpt.train = tcfg;
  ckpt.vocab_pieces = vocab.pieces();
  Params init = init_params<double>(study.model, tcfg.seed);
  TrainResult result;
  if (manifest.task == Task::sequence) {
    const auto train = import_seq_dataset(dir / "train.jsonl");
    const auto dev = import_seq_dataset(dir / "dev.jsonl");
    result = train_sequence(std::move(init), study.model, study.pooling, vocab, train, dev, tcfg);
  } else {
    const auto train = import_tok_dataset(dir / "train.jsonl");
    const auto dev = import_tok_dataset(dir / "dev.jsonl");
    result = train_tokens(std::move(init), study.model, vocab, train, dev, tcfg);
  }
  ckpt.params = std::move(result.params);
  ckpt.trace = std::move(result.trace);
  ckpt.extra = artifact_header(
      "train", Json{{"dataset", manifest_to_json(manifest)},
                    {"vocab", file_ref(o.vocab)},
                    {"model_config", o.model_config.empty() ? Json(nullptr) : file_ref(o.model_config)}});
  save_checkpoint(ckpt, o.out);
  for (const auto& m : ckpt.trace) {
    out << "epoch " << m.epoch << " loss " << m.train_loss;
    if (m.dev_f1) out << " dev_f1 " << format_metric(*m.dev_f1);
    out << "\n";
  }
}

// ---- predict --------------------------------------------------------------

struct PredictOptions {
  std::string checkpoint, segments, out;
};

JsonlFile predict_file(const Checkpoint& ckpt, std::span<const Segment> segments) {
  const Vocabulary vocab = ckpt.vocabulary();
  JsonlFile file;
  if (ckpt.head.task == Task::sequence) {
    for (const auto& p : predict_sequence(ckpt.params, ckpt.model, ckpt.head.pooling, segments, vocab, ckpt.train.max_len)) {
      file.records.push_back(prediction_to_json(p));
    }
  } else {
    for (const auto& p : predict_tokens(ckpt.params, ckpt.model, segments, vocab, ckpt.train.max_len)) {
      file.records.push_back(prediction_to_json(p));
    }
  }
  return file;
}

void cmd_predict(const PredictOptions& o, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const SegmentFile seg = load_segments(o.segments);
  JsonlFile file = predict_file(ckpt, seg.segments);
  Json header = artifact_header("predict", Json{{"checkpoint", file_ref(o.checkpoint)},
                                                {"segments", file_ref(o.segments)},
                                                {"task", to_string(ckpt.head.task)},
                                                {"pooling", to_string(ckpt.head.pooling)},
                                                {"max_len", ckpt.train.max_len}});
  header["corpus_hash"] = seg.corpus_hash;
  file.header = std::move(header);
  write_jsonl(o.out, file);
  out << "predicted " << seg.segments.size() << " segments\n";
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateOptions {
  std::string predictions, gold, task = "sequence", out;
};

void cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const Task task = parse_task(o.task);
  const JsonlFile preds = read_jsonl(o.predictions);
  const JsonlFile gold = read_jsonl(o.gold);
  auto hash_of = [](const JsonlFile& f) -> std::optional<std::string> {
    if (f.header && f.header->contains("corpus_hash")) return f.header->at("corpus_hash").get<std::string>();
    return std::nullopt;
  };
  const auto ph = hash_of(preds), gh = hash_of(gold);
  if (ph && gh && *ph != *gh) {
    throw UsageError("corpus hash mismatch: predictions " + *ph + ", gold " + *gh);
  }
  if (preds.header && preds.header->contains("config")) {
    const Json& c = preds.header->at("config");
    if (c.contains("task") && c.at("task").get<std::string>() != to_string(task)) {
      throw UsageError("predictions are for task " + c.at("task").get<std::string>() + ", not " +
                       std::string(to_string(task)));
    }
  }
  EvalReport report = task == Task::sequence
                          ? score_sequence_predictions(seq_predictions_from_jsonl(preds), seq_examples_from_jsonl(gold))
                          : score_token_predictions_softmatch(tok_predictions_from_jsonl(preds),
                                                              tok_examples_from_jsonl(gold));
  report.config = artifact_header("evaluate", Json{{"predictions", file_ref(o.predictions)},
                                                   {"gold", file_ref(o.gold)},
                                                   {"task", to_string(task)}});
  report.config["corpus_hash"] = gh ? Json(*gh) : (ph ? Json(*ph) : Json(nullptr));
  write_json(o.out, report_to_json(report));
  const auto& m = report.matrix;
  out << "tp " << m.tp << " fp " << m.fp << " fn " << m.fn << " tn " << m.tn << " f1 " << format_metric(report.f1)
      << "\n";
}

// ---- baseline -------------------------------------------------------------

struct BaselineOptions {
  std::string segments, lexicon, mode = "combined", out;
  std::vector<std::string> wordlists;
};

void cmd_baseline(const BaselineOptions& o, std::ostream& out) {
  const SegmentFile seg = load_segments(o.segments);
  const SpellLexicon lexicon = load_lexicon(o.lexicon);
  ReferenceWordlist wordlist;
  Json refs = Json::array();
  for (const auto& path : o.wordlists) {
    const ReferenceWordlist part = ReferenceWordlist::load(path);
    wordlist.words.insert(part.words.begin(), part.words.end());
    refs.push_back(file_ref(path));
  }
  const MatchMode mode = parse_match_mode(o.mode);
  EvalReport report = dictionary_baseline(seg.segments, wordlist, lexicon, mode);
  report.config = artifact_header("baseline", Json{{"segments", file_ref(o.segments)},
                                                   {"wordlists", refs},
                                                   {"lexicon", file_ref(o.lexicon)},
                                                   {"mode", to_string(mode)}});
  report.config["corpus_hash"] = seg.corpus_hash;
  write_json(o.out, report_to_json(report));
  out << "baseline f1 " << format_metric(report.f1) << "\n";
}

// ---- attribute ------------------------------------------------------------

struct AttributeOptions {
  std::string checkpoint, segments, format = "html", out;
};

std::string safe_name(std::string_view id) {
  std::string s(id);
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return s;
}

void cmd_attribute(const AttributeOptions& o, std::ostream& out) {
  const RenderFormat format = parse_render_format(o.format);
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  if (ckpt.head.task != Task::sequence) throw UsageError("attribution needs a sequence checkpoint");
  const SegmentFile seg = load_segments(o.segments);
  const Vocabulary vocab = ckpt.vocabulary();
  const fs::path dir = o.out;
  JsonlFile file;
  Json header = artifact_header("attribute", Json{{"checkpoint", file_ref(o.checkpoint)},
                                                  {"segments", file_ref(o.segments)},
                                                  {"format", o.format},
                                                  {"target", "positive"},
                                                  {"method", "gradient_x_input_logit"}});
  header["corpus_hash"] = seg.corpus_hash;
  file.header = std::move(header);
  const char* ext = format == RenderFormat::html ? ".html" : ".ansi";
  for (const auto& s : seg.segments) {
    const auto report = attribute_sequence(ckpt.params, ckpt.model, ckpt.head.pooling, s.seg_id, s.text, vocab,
                                           Label::positive, ckpt.train.max_len);
    write_file(dir / (safe_name(s.seg_id) + ext), render_attribution(report, format));
    file.records.push_back(report_to_json(report));
  }
  write_jsonl(dir / "attributions.jsonl", file);
  out << "attributed " << seg.segments.size() << " segments\n";
}

// ---- screen ---------------------------------------------------------------

struct ScreenOptions {
  std::string checkpoint, corpus, split = "sequence", out;
};

void cmd_screen(const ScreenOptions& o, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const Vocabulary vocab = ckpt.vocabulary();
  // Two positions go to [CLS] and [SEP].
  const SplitStrategy strategy{parse_split_variant(o.split), ckpt.train.max_len - 2};
  strategy.validate();
  const auto docs = load_documents(o.corpus, DocumentRole::eval);
  if (docs.empty()) throw InputError("no .txt documents in " + o.corpus);
  const auto segments = segment_corpus(docs, strategy, &vocab);

  JsonlFile file;
  std::size_t positives = 0;
  if (ckpt.head.task == Task::sequence) {
    const auto preds = predict_sequence(ckpt.params, ckpt.model, ckpt.head.pooling, segments, vocab, ckpt.train.max_len);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i].label != Label::positive) continue;
      ++positives;
      file.records.push_back(Json{{"seg_id", segments[i].seg_id},
                                  {"doc_id", segments[i].doc_id},
                                  {"text", segments[i].text},
                                  {"positive_probability", preds[i].positive_probability}});
    }
  } else {
    const auto preds = predict_tokens(ckpt.params, ckpt.model, segments, vocab, ckpt.train.max_len);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (std::none_of(preds[i].tags.begin(), preds[i].tags.end(), [](Tag t) { return t != Tag::O; })) continue;
      ++positives;
      Json j = prediction_to_json(preds[i]);
      j["doc_id"] = segments[i].doc_id;
      j["text"] = segments[i].text;
      file.records.push_back(std::move(j));
    }
  }
  Json header = artifact_header("screen", Json{{"checkpoint", file_ref(o.checkpoint)},
                                               {"foreign_corpus", fs::path(o.corpus).filename().string()},
                                               {"split", to_string(strategy.variant)},
                                               {"max_tokens", strategy.max_tokens},
                                               {"task", to_string(ckpt.head.task)}});
  header["counts"] = {{"all", segments.size()}, {"positive", positives}};
  header["corpus_hash"] = corpus_hash(segments);
  file.header = std::move(header);
  write_jsonl(o.out, file);
  out << "All: " << segments.size() << "\nPositive: " << positives << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spellscan: spell detection in novel text", "spellscan"};
  app.require_subcommand(1);
  const std::vector<std::string> splits = {"sentence", "paragraph", "sequence"};
  const std::vector<std::string> modes = {"incantations", "combined"};
  const std::vector<std::string> tasks = {"sequence", "token"};
  std::function<void()> action;

  IngestOptions ingest;
  auto* c = app.add_subcommand("ingest", "Normalise and segment a directory of .txt files");
  c->add_option("--input", ingest.input, "Corpus directory")->required();
  c->add_option("--out", ingest.out, "Segments file (JSONL)")->required();
  c->add_option("--split", ingest.split)->check(CLI::IsMember(splits));
  c->add_option("--max-tokens", ingest.max_tokens, "Token budget for --split sequence");
  c->add_option("--vocab", ingest.vocab, "Vocabulary for token counting");
  c->callback([&] { action = [&] { cmd_ingest(ingest, out); }; });

  BuildOptions build;
  c = app.add_subcommand("build", "Label segments and sample a train/dev dataset");
  c->add_option("--segments", build.segments)->required();
  c->add_option("--lexicon", build.lexicon)->required();
  c->add_option("--mode", build.mode)->check(CLI::IsMember(modes));
  c->add_option("--task", build.task)->check(CLI::IsMember(tasks));
  c->add_option("--neg-ratio", build.neg_ratio);
  c->add_option("--seed", build.seed);
  c->add_option("--out", build.out, "Dataset directory")->required();
  c->add_flag("--eval", build.eval, "Label every segment (gold file for evaluation) instead of sampling");
  c->callback([&] { action = [&] { cmd_build(build, out); }; });

  ExtendOptions extend;
  c = app.add_subcommand("extend-vocab", "Append lexicon words to a vocabulary");
  c->add_option("--vocab", extend.vocab)->required();
  c->add_option("--lexicon", extend.lexicon)->required();
  c->add_option("--out", extend.out)->required();
  c->callback([&] { action = [&] { cmd_extend_vocab(extend, out); }; });

  TrainOptions train;
  c = app.add_subcommand("train", "Train a model on a built dataset");
  c->add_option("--dataset", train.dataset)->required();
  c->add_option("--vocab", train.vocab)->required();
  c->add_option("--model-config", train.model_config, "JSON object of model settings");
  c->add_option("--epochs", train.epochs);
  c->add_option("--batch", train.batch);
  c->add_option("--lr", train.lr);
  c->add_option("--seed", train.seed);
  c->add_option("--out", train.out, "Checkpoint file")->required();
  c->callback([&] { action = [&] { cmd_train(train, out); }; });

  PredictOptions predict;
  c = app.add_subcommand("predict", "Predict labels or tags for a segments file");
  c->add_option("--checkpoint", predict.checkpoint)->required();
  c->add_option("--segments", predict.segments)->required();
  c->add_option("--out", predict.out)->required();
  c->callback([&] { action = [&] { cmd_predict(predict, out); }; });

  EvaluateOptions evaluate;
  c = app.add_subcommand("evaluate", "Score predictions against gold labels");
  c->add_option("--predictions", evaluate.predictions)->required();
  c->add_option("--gold", evaluate.gold)->required();
  c->add_option("--task", evaluate.task)->check(CLI::IsMember(tasks));
  c->add_option("--out", evaluate.out)->required();
  c->callback([&] { action = [&] { cmd_evaluate(evaluate, out); }; });

  BaselineOptions baseline;
  c = app.add_subcommand("baseline", "Out-of-wordlist dictionary baseline");
  c->add_option("--segments", baseline.segments)->required();
  c->add_option("--wordlist", baseline.wordlists, "Wordlist file; repeat to merge lists")->required();
  c->add_option("--lexicon", baseline.lexicon)->required();
  c->add_option("--mode", baseline.mode)->check(CLI::IsMember(modes));
  c->add_option("--out", baseline.out)->required();
  c->callback([&] { action = [&] { cmd_baseline(baseline, out); }; });

  AttributeOptions attribute;
  c = app.add_subcommand("attribute", "Per-piece attribution reports");
  c->add_option("--checkpoint", attribute.checkpoint)->required();
  c->add_option("--segments", attribute.segments)->required();
  c->add_option("--format", attribute.format)->check(CLI::IsMember({"ansi", "html"}));
  c->add_option("--out", attribute.out, "Output directory")->required();
  c->callback([&] { action = [&] { cmd_attribute(attribute, out); }; });

  ScreenOptions screen;
  c = app.add_subcommand("screen", "Emit positively classified segments of a foreign corpus");
  c->add_option("--checkpoint", screen.checkpoint)->required();
  c->add_option("--foreign-corpus", screen.corpus)->required();
  c->add_option("--split", screen.split)->check(CLI::IsMember(splits));
  c->add_option("--out", screen.out)->required();
  c->callback([&] { action = [&] { cmd_screen(screen, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: usage: " << msg << "\n";
    return 2;
  }

  try {
    action();
  } catch (const UsageError& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << e.kind() << ": " << msg << "\n";
    return 1;
  } catch (const Json::exception& e) {
    err << "error: format: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spellscan
