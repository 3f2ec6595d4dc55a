#pragma once

#include <span>
#include <vector>

#include "spellscan/dataset.hpp"
#include "spellscan/model/heads.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan::model {

inline constexpr int kIgnoreLabel = -1;

// Piece-level class targets from word tags: B lands on a word's first piece
// and I on its remaining pieces; specials and padding get kIgnoreLabel.
std::vector<int> piece_labels(const Encoding& encoding, std::span<const Tag> word_tags);

struct TrainingBatch {
  std::vector<const Encoding*> encodings;
  std::vector<int> sequence_labels;                   // sequence task: one class per encoding
  std::vector<const std::vector<int>*> token_labels;  // token task: per position, kIgnoreLabel skipped
};

// Mean cross-entropy of the batch. With `grads` non-null the exact gradient
// is accumulated there; `dropout_rng` non-null turns on training dropout.
// Sequences are trimmed to their real length, which the attention mask makes
// equivalent to running the padded input.
template <typename Scalar>
Scalar batch_loss(const Parameters<Scalar>& p, const ModelConfig& cfg, const HeadConfig& head,
                  const TrainingBatch& batch, Parameters<Scalar>* grads, Rng* dropout_rng = nullptr) {
  EncoderCache<Scalar> cache;
  Scalar total = 0;
  if (head.task == Task::sequence) {
    const Scalar scale = Scalar(1) / Scalar(batch.encodings.size());
    for (std::size_t i = 0; i < batch.encodings.size(); ++i) {
      const Encoding& enc = *batch.encodings[i];
      const Index len = enc.real_length();
      const Matrix<Scalar>& states =
          encode(p, cfg, std::span<const int>(enc.ids.data(), static_cast<std::size_t>(len)), len, cache, dropout_rng);
      PoolCache<Scalar> pcache;
      const RowVector<Scalar> logits = sequence_logits(p, states, len, head.pooling, &pcache);
      RowVector<Scalar> d_logits;
      total += scale * cross_entropy(logits, batch.sequence_labels[i], grads ? &d_logits : nullptr, scale);
      if (grads) {
        const Matrix<Scalar> d_states = sequence_head_backward(p, pcache, len, d_logits, *grads);
        encode_backward(p, cfg, cache, d_states, *grads);
      }
    }
    return total;
  }

  std::size_t labeled = 0;
  for (std::size_t i = 0; i < batch.encodings.size(); ++i) {
    const int len = batch.encodings[i]->real_length();
    for (int t = 0; t < len; ++t) labeled += (*batch.token_labels[i])[static_cast<std::size_t>(t)] != kIgnoreLabel;
  }
  if (labeled == 0) return Scalar(0);
  const Scalar scale = Scalar(1) / Scalar(labeled);
  for (std::size_t i = 0; i < batch.encodings.size(); ++i) {
    const Encoding& enc = *batch.encodings[i];
    const std::vector<int>& labels = *batch.token_labels[i];
    const Index len = enc.real_length();
    const Matrix<Scalar>& states =
        encode(p, cfg, std::span<const int>(enc.ids.data(), static_cast<std::size_t>(len)), len, cache, dropout_rng);
    const Matrix<Scalar> logits = token_logits(p, states);
    Matrix<Scalar> d_logits = Matrix<Scalar>::Zero(len, logits.cols());
    for (Index t = 0; t < len; ++t) {
      const int target = labels[static_cast<std::size_t>(t)];
      if (target == kIgnoreLabel) continue;
      RowVector<Scalar> d_row;
      total += scale * cross_entropy(RowVector<Scalar>(logits.row(t)), target, grads ? &d_row : nullptr, scale);
      if (grads) d_logits.row(t) = d_row;
    }
    if (grads) {
      const Matrix<Scalar> d_states = token_head_backward(p, states, d_logits, *grads);
      encode_backward(p, cfg, cache, d_states, *grads);
    }
  }
  return total;
}

// Full-width encoder outputs (max_len rows each, padded rows included).
template <typename Scalar>
std::vector<Matrix<Scalar>> forward_encoder(const Parameters<Scalar>& p, const ModelConfig& cfg,
                                            std::span<const Encoding> encodings, Rng* dropout_rng = nullptr) {
  std::vector<Matrix<Scalar>> out;
  out.reserve(encodings.size());
  EncoderCache<Scalar> cache;
  for (const Encoding& enc : encodings) {
    out.push_back(encode(p, cfg, std::span<const int>(enc.ids), enc.real_length(), cache, dropout_rng));
  }
  return out;
}

// batch x 2
template <typename Scalar>
Matrix<Scalar> forward_sequence_logits(const Parameters<Scalar>& p, const ModelConfig& cfg, Pooling pooling,
                                       std::span<const Encoding> encodings) {
  Matrix<Scalar> out(static_cast<Index>(encodings.size()), 2);
  EncoderCache<Scalar> cache;
  for (std::size_t i = 0; i < encodings.size(); ++i) {
    const Encoding& enc = encodings[i];
    const Matrix<Scalar>& states = encode(p, cfg, std::span<const int>(enc.ids), enc.real_length(), cache);
    out.row(static_cast<Index>(i)) = sequence_logits(p, states, enc.real_length(), pooling);
  }
  return out;
}

// batch of max_len x 3
template <typename Scalar>
std::vector<Matrix<Scalar>> forward_token_logits(const Parameters<Scalar>& p, const ModelConfig& cfg,
                                                 std::span<const Encoding> encodings) {
  std::vector<Matrix<Scalar>> out;
  out.reserve(encodings.size());
  for (const Matrix<Scalar>& states : forward_encoder(p, cfg, encodings)) out.push_back(token_logits(p, states));
  return out;
}

}  // namespace spellscan::model
