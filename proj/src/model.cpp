#include "spellscan/model/model.hpp"

#include <cmath>
#include <numeric>

#include "spellscan/errors.hpp"

namespace spellscan::model {

std::vector<int> piece_labels(const Encoding& encoding, std::span<const Tag> word_tags) {
  std::vector<int> labels(encoding.ids.size(), kIgnoreLabel);
  std::optional<int> previous;
  for (std::size_t i = 0; i < encoding.ids.size(); ++i) {
    const auto& w = encoding.word_ids[i];
    if (!w) {
      previous.reset();
      continue;
    }
    const Tag tag = word_tags[static_cast<std::size_t>(*w)];
    const bool first_piece = previous != w;
    if (tag == Tag::O) {
      labels[i] = static_cast<int>(Tag::O);
    } else if (tag == Tag::B && first_piece) {
      labels[i] = static_cast<int>(Tag::B);
    } else {
      labels[i] = static_cast<int>(Tag::I);
    }
    previous = w;
  }
  return labels;
}

Json to_json(const EpochMetrics& m) {
  Json j;
  j["epoch"] = m.epoch;
  j["train_loss"] = m.train_loss;
  j["dev_f1"] = m.dev_f1 ? Json(*m.dev_f1) : Json(nullptr);
  return j;
}

EpochMetrics epoch_metrics_from_json(const Json& j) {
  EpochMetrics m;
  m.epoch = j.at("epoch").get<int>();
  m.train_loss = j.at("train_loss").get<double>();
  if (!j.at("dev_f1").is_null()) m.dev_f1 = j.at("dev_f1").get<double>();
  return m;
}

void check_vocab_fits(const Params& params, const Vocabulary& vocab) {
  if (static_cast<Index>(vocab.size()) != params.token_embeddings.rows()) {
    throw VocabError("vocabulary has " + std::to_string(vocab.size()) + " pieces but the model embeds " +
                     std::to_string(params.token_embeddings.rows()));
  }
}

namespace {

constexpr std::uint64_t kDropoutStream = 0x9e3779b97f4a7c15ULL;

void check_training_inputs(const Params& params, const ModelConfig& cfg, const Vocabulary& vocab,
                           const TrainConfig& tcfg, std::size_t train_size) {
  tcfg.validate();
  cfg.validate();
  if (cfg.max_positions < tcfg.max_len) {
    throw ConfigError("max_positions " + std::to_string(cfg.max_positions) + " is below max_len " +
                      std::to_string(tcfg.max_len));
  }
  check_vocab_fits(params, vocab);
  if (train_size == 0) throw InputError("training set is empty");
}

void zero(Params& grads) {
  for (auto& v : grads.views()) std::fill(v.data, v.data + v.size(), 0.0);
}

void check_finite(const Params& grads) {
  for (const auto& v : grads.views()) {
    for (Index i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v.data[i])) throw TrainingError("non-finite gradient in " + v.name);
    }
  }
}

// Shared epoch loop; `fill` puts the examples at the given indices into a batch.
template <typename Fill, typename DevF1>
TrainResult run_training(Params params, const ModelConfig& cfg, const HeadConfig& head, std::size_t n,
                         const TrainConfig& tcfg, Fill fill, DevF1 dev_f1) {
  TrainResult result;
  Rng order_rng(tcfg.seed);
  Rng dropout_rng(tcfg.seed ^ kDropoutStream);
  Adam<double> adam(params, tcfg);
  Params grads = params.zeros_like();
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    order_rng.shuffle(order);
    double loss_sum = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(tcfg.batch_size));
      TrainingBatch batch;
      for (std::size_t k = start; k < end; ++k) fill(batch, order[k]);
      zero(grads);
      const double loss = batch_loss(params, cfg, head, batch, &grads, &dropout_rng);
      if (!std::isfinite(loss)) throw TrainingError("non-finite loss in epoch " + std::to_string(epoch));
      check_finite(grads);
      adam.step(params, grads);
      loss_sum += loss * static_cast<double>(end - start);
    }
    result.trace.push_back(EpochMetrics{epoch, loss_sum / static_cast<double>(n), dev_f1(params)});
  }
  result.params = std::move(params);
  return result;
}

}  // namespace

TrainResult train_sequence(Params params, const ModelConfig& cfg, Pooling pooling, const Vocabulary& vocab,
                           std::span<const SeqExample> train, std::span<const SeqExample> dev,
                           const TrainConfig& tcfg) {
  check_training_inputs(params, cfg, vocab, tcfg, train.size());
  std::vector<Encoding> encodings;
  encodings.reserve(train.size());
  for (const auto& e : train) encodings.push_back(encode_text(e.text, vocab, tcfg.max_len));
  auto fill = [&](TrainingBatch& b, std::size_t i) {
    b.encodings.push_back(&encodings[i]);
    b.sequence_labels.push_back(static_cast<int>(train[i].label));
  };
  auto dev_f1 = [&](const Params& p) -> std::optional<double> {
    if (dev.empty()) return std::nullopt;
    return score_sequence_predictions(predict_sequence(p, cfg, pooling, dev, vocab, tcfg.max_len), dev).f1;
  };
  return run_training(std::move(params), cfg, HeadConfig{Task::sequence, pooling}, train.size(), tcfg, fill, dev_f1);
}

TrainResult train_tokens(Params params, const ModelConfig& cfg, const Vocabulary& vocab,
                         std::span<const TokExample> train, std::span<const TokExample> dev, const TrainConfig& tcfg) {
  check_training_inputs(params, cfg, vocab, tcfg, train.size());
  std::vector<Encoding> encodings;
  std::vector<std::vector<int>> labels;
  encodings.reserve(train.size());
  labels.reserve(train.size());
  for (const auto& e : train) {
    encodings.push_back(encode_words(e.words, vocab, tcfg.max_len));
    labels.push_back(piece_labels(encodings.back(), e.tags));
  }
  auto fill = [&](TrainingBatch& b, std::size_t i) {
    b.encodings.push_back(&encodings[i]);
    b.token_labels.push_back(&labels[i]);
  };
  auto dev_f1 = [&](const Params& p) -> std::optional<double> {
    if (dev.empty()) return std::nullopt;
    return score_token_predictions_softmatch(predict_tokens(p, cfg, dev, vocab, tcfg.max_len), dev).f1;
  };
  return run_training(std::move(params), cfg, HeadConfig{Task::token, Pooling::cls}, train.size(), tcfg, fill,
                      dev_f1);
}

namespace {

SeqPrediction predict_one(const Params& params, const ModelConfig& cfg, Pooling pooling, const std::string& seg_id,
                          const Encoding& enc, EncoderCache<double>& cache) {
  const Index len = enc.real_length();
  const auto& states = encode(params, cfg, std::span<const int>(enc.ids.data(), static_cast<std::size_t>(len)), len,
                              cache);
  const RowVector<double> probs = softmax(sequence_logits(params, states, len, pooling));
  return SeqPrediction{seg_id, probs(1) > probs(0) ? Label::positive : Label::negative, probs(1)};
}

TokPrediction predict_words(const Params& params, const ModelConfig& cfg, const std::string& seg_id,
                            std::vector<std::string> words, const Vocabulary& vocab, int max_len,
                            EncoderCache<double>& cache) {
  const Encoding enc = encode_words(words, vocab, max_len);
  const Index len = enc.real_length();
  const auto& states = encode(params, cfg, std::span<const int>(enc.ids.data(), static_cast<std::size_t>(len)), len,
                              cache);
  const Matrix<double> logits = token_logits(params, states);
  std::vector<int> classes(static_cast<std::size_t>(len));
  for (Index t = 0; t < len; ++t) classes[static_cast<std::size_t>(t)] = argmax_lowest(logits.row(t));
  TokPrediction p;
  p.seg_id = seg_id;
  p.tags = word_tags_from_pieces(enc, classes, words.size());
  p.words = std::move(words);
  return p;
}

}  // namespace

std::vector<SeqPrediction> predict_sequence(const Params& params, const ModelConfig& cfg, Pooling pooling,
                                            std::span<const Segment> segments, const Vocabulary& vocab, int max_len) {
  check_vocab_fits(params, vocab);
  std::vector<SeqPrediction> out;
  out.reserve(segments.size());
  EncoderCache<double> cache;
  for (const auto& s : segments) {
    out.push_back(predict_one(params, cfg, pooling, s.seg_id, encode_text(s.text, vocab, max_len), cache));
  }
  return out;
}

std::vector<SeqPrediction> predict_sequence(const Params& params, const ModelConfig& cfg, Pooling pooling,
                                            std::span<const SeqExample> examples, const Vocabulary& vocab,
                                            int max_len) {
  check_vocab_fits(params, vocab);
  std::vector<SeqPrediction> out;
  out.reserve(examples.size());
  EncoderCache<double> cache;
  for (const auto& e : examples) {
    out.push_back(predict_one(params, cfg, pooling, e.seg_id, encode_text(e.text, vocab, max_len), cache));
  }
  return out;
}

std::vector<Tag> word_tags_from_pieces(const Encoding& encoding, std::span<const int> piece_classes,
                                       std::size_t word_count) {
  std::vector<Tag> tags(word_count, Tag::O);
  std::vector<bool> decided(word_count, false);
  for (std::size_t i = 0; i < piece_classes.size() && i < encoding.word_ids.size(); ++i) {
    const auto& w = encoding.word_ids[i];
    if (!w) continue;
    const auto word = static_cast<std::size_t>(*w);
    if (decided[word] || piece_classes[i] == static_cast<int>(Tag::O)) continue;
    tags[word] = static_cast<Tag>(piece_classes[i]);
    decided[word] = true;
  }
  return tags;
}

std::vector<TokPrediction> predict_tokens(const Params& params, const ModelConfig& cfg,
                                          std::span<const Segment> segments, const Vocabulary& vocab, int max_len) {
  check_vocab_fits(params, vocab);
  std::vector<TokPrediction> out;
  out.reserve(segments.size());
  EncoderCache<double> cache;
  for (const auto& s : segments) {
    std::vector<std::string> words;
    for (auto& w : split_words(s.text)) words.push_back(std::move(w.text));
    out.push_back(predict_words(params, cfg, s.seg_id, std::move(words), vocab, max_len, cache));
  }
  return out;
}

std::vector<TokPrediction> predict_tokens(const Params& params, const ModelConfig& cfg,
                                          std::span<const TokExample> examples, const Vocabulary& vocab, int max_len) {
  check_vocab_fits(params, vocab);
  std::vector<TokPrediction> out;
  out.reserve(examples.size());
  EncoderCache<double> cache;
  for (const auto& e : examples) out.push_back(predict_words(params, cfg, e.seg_id, e.words, vocab, max_len, cache));
  return out;
}

}  // namespace spellscan::model
