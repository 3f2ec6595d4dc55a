#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spellscan/corpus.hpp"
#include "spellscan/dataset.hpp"
#include "spellscan/eval.hpp"
#include "spellscan/model/adam.hpp"
#include "spellscan/model/batch.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan::model {

using Params = Parameters<double>;

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0;
  std::optional<double> dev_f1;  // absent when the dev set is empty
};

struct TrainResult {
  Params params;
  std::vector<EpochMetrics> trace;
};

Json to_json(const EpochMetrics& m);
EpochMetrics epoch_metrics_from_json(const Json& j);

// Seeded shuffle each epoch, mini-batches, one Adam step per batch. Throws
// TrainingError naming the first parameter with a non-finite gradient.
TrainResult train_sequence(Params params, const ModelConfig& cfg, Pooling pooling, const Vocabulary& vocab,
                           std::span<const SeqExample> train, std::span<const SeqExample> dev,
                           const TrainConfig& tcfg);
TrainResult train_tokens(Params params, const ModelConfig& cfg, const Vocabulary& vocab,
                         std::span<const TokExample> train, std::span<const TokExample> dev, const TrainConfig& tcfg);

// Throws VocabError when the vocabulary does not fit the embedding table.
void check_vocab_fits(const Params& params, const Vocabulary& vocab);

// Positive only when p(positive) > 0.5, so an exact tie is negative.
std::vector<SeqPrediction> predict_sequence(const Params& params, const ModelConfig& cfg, Pooling pooling,
                                            std::span<const Segment> segments, const Vocabulary& vocab, int max_len);
std::vector<SeqPrediction> predict_sequence(const Params& params, const ModelConfig& cfg, Pooling pooling,
                                            std::span<const SeqExample> examples, const Vocabulary& vocab,
                                            int max_len);

// Word tag from piece classes: the first piece predicted B or I decides,
// otherwise O. Words cut off by truncation are O.
std::vector<Tag> word_tags_from_pieces(const Encoding& encoding, std::span<const int> piece_classes,
                                       std::size_t word_count);
std::vector<TokPrediction> predict_tokens(const Params& params, const ModelConfig& cfg,
                                          std::span<const Segment> segments, const Vocabulary& vocab, int max_len);
std::vector<TokPrediction> predict_tokens(const Params& params, const ModelConfig& cfg,
                                          std::span<const TokExample> examples, const Vocabulary& vocab, int max_len);

}  // namespace spellscan::model
