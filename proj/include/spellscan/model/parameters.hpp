#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spellscan/errors.hpp"
#include "spellscan/model/config.hpp"
#include "spellscan/random.hpp"

namespace spellscan::model {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using ColVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <typename Scalar>
struct LayerParameters {
  RowVector<Scalar> attn_norm_gain, attn_norm_bias;
  Matrix<Scalar> query_weight, key_weight, value_weight, output_weight;  // hidden x hidden
  RowVector<Scalar> query_bias, key_bias, value_bias, output_bias;
  RowVector<Scalar> ffn_norm_gain, ffn_norm_bias;
  Matrix<Scalar> ffn_in_weight;  // hidden x ffn
  RowVector<Scalar> ffn_in_bias;
  Matrix<Scalar> ffn_out_weight;  // ffn x hidden
  RowVector<Scalar> ffn_out_bias;
};

// Flat view of one named tensor, row-major.
template <typename Ptr>
struct TensorView {
  std::string name;
  Ptr data;
  Index rows;
  Index cols;
  Index size() const { return rows * cols; }
};

template <typename Scalar>
struct Parameters {
  Matrix<Scalar> token_embeddings;     // vocab x hidden
  Matrix<Scalar> position_embeddings;  // max_positions x hidden
  std::vector<LayerParameters<Scalar>> layers;
  RowVector<Scalar> final_norm_gain, final_norm_bias;
  Matrix<Scalar> sequence_head_weight;  // hidden x 2
  RowVector<Scalar> sequence_head_bias;
  Matrix<Scalar> token_head_weight;  // hidden x 3 (O, B, I)
  RowVector<Scalar> token_head_bias;

  // Every tensor in declaration order; this order is the checkpoint layout.
  std::vector<TensorView<Scalar*>> views() { return collect<Scalar*>(*this); }
  std::vector<TensorView<const Scalar*>> views() const { return collect<const Scalar*>(*this); }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& v : views()) n += static_cast<std::size_t>(v.size());
    return n;
  }

  Parameters zeros_like() const {
    Parameters z = *this;
    for (auto& v : z.views()) std::fill(v.data, v.data + v.size(), Scalar(0));
    return z;
  }

  template <typename Other>
  Parameters<Other> cast() const {
    Parameters<Other> out;
    out.token_embeddings = token_embeddings.template cast<Other>();
    out.position_embeddings = position_embeddings.template cast<Other>();
    for (const auto& l : layers) {
      LayerParameters<Other> o;
      o.attn_norm_gain = l.attn_norm_gain.template cast<Other>();
      o.attn_norm_bias = l.attn_norm_bias.template cast<Other>();
      o.query_weight = l.query_weight.template cast<Other>();
      o.key_weight = l.key_weight.template cast<Other>();
      o.value_weight = l.value_weight.template cast<Other>();
      o.output_weight = l.output_weight.template cast<Other>();
      o.query_bias = l.query_bias.template cast<Other>();
      o.key_bias = l.key_bias.template cast<Other>();
      o.value_bias = l.value_bias.template cast<Other>();
      o.output_bias = l.output_bias.template cast<Other>();
      o.ffn_norm_gain = l.ffn_norm_gain.template cast<Other>();
      o.ffn_norm_bias = l.ffn_norm_bias.template cast<Other>();
      o.ffn_in_weight = l.ffn_in_weight.template cast<Other>();
      o.ffn_in_bias = l.ffn_in_bias.template cast<Other>();
      o.ffn_out_weight = l.ffn_out_weight.template cast<Other>();
      o.ffn_out_bias = l.ffn_out_bias.template cast<Other>();
      out.layers.push_back(std::move(o));
    }
    out.final_norm_gain = final_norm_gain.template cast<Other>();
    out.final_norm_bias = final_norm_bias.template cast<Other>();
    out.sequence_head_weight = sequence_head_weight.template cast<Other>();
    out.sequence_head_bias = sequence_head_bias.template cast<Other>();
    out.token_head_weight = token_head_weight.template cast<Other>();
    out.token_head_bias = token_head_bias.template cast<Other>();
    return out;
  }

 private:
  template <typename Ptr, typename Self>
  static std::vector<TensorView<Ptr>> collect(Self& self) {
    std::vector<TensorView<Ptr>> out;
    auto add = [&out](std::string name, auto& t) {
      out.push_back(TensorView<Ptr>{std::move(name), t.data(), t.rows(), t.cols()});
    };
    add("embeddings.token", self.token_embeddings);
    add("embeddings.position", self.position_embeddings);
    for (std::size_t i = 0; i < self.layers.size(); ++i) {
      auto& l = self.layers[i];
      const std::string p = "layers." + std::to_string(i) + ".";
      add(p + "attention_norm.gain", l.attn_norm_gain);
      add(p + "attention_norm.bias", l.attn_norm_bias);
      add(p + "attention.query.weight", l.query_weight);
      add(p + "attention.query.bias", l.query_bias);
      add(p + "attention.key.weight", l.key_weight);
      add(p + "attention.key.bias", l.key_bias);
      add(p + "attention.value.weight", l.value_weight);
      add(p + "attention.value.bias", l.value_bias);
      add(p + "attention.output.weight", l.output_weight);
      add(p + "attention.output.bias", l.output_bias);
      add(p + "ffn_norm.gain", l.ffn_norm_gain);
      add(p + "ffn_norm.bias", l.ffn_norm_bias);
      add(p + "ffn.in.weight", l.ffn_in_weight);
      add(p + "ffn.in.bias", l.ffn_in_bias);
      add(p + "ffn.out.weight", l.ffn_out_weight);
      add(p + "ffn.out.bias", l.ffn_out_bias);
    }
    add("final_norm.gain", self.final_norm_gain);
    add("final_norm.bias", self.final_norm_bias);
    add("sequence_head.weight", self.sequence_head_weight);
    add("sequence_head.bias", self.sequence_head_bias);
    add("token_head.weight", self.token_head_weight);
    add("token_head.bias", self.token_head_bias);
    return out;
  }
};

inline constexpr double kInitStddev = 0.02;

// Weights and embeddings from a normal truncated at two standard deviations,
// biases zero, layer-norm gains one.
template <typename Scalar>
Parameters<Scalar> init_params(const ModelConfig& cfg, std::uint64_t seed, double stddev = kInitStddev) {
  cfg.validate();
  Rng rng(seed);
  const Index h = cfg.hidden;
  const Index f = cfg.ffn;
  auto weights = [&](Index rows, Index cols) {
    Matrix<Scalar> m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(rng.truncated_normal(stddev));
    return m;
  };
  auto zeros = [](Index n) { return RowVector<Scalar>::Zero(n).eval(); };
  auto ones = [](Index n) { return RowVector<Scalar>::Ones(n).eval(); };

  Parameters<Scalar> p;
  p.token_embeddings = weights(cfg.vocab_size, h);
  p.position_embeddings = weights(cfg.max_positions, h);
  for (int i = 0; i < cfg.layers; ++i) {
    LayerParameters<Scalar> l;
    l.attn_norm_gain = ones(h);
    l.attn_norm_bias = zeros(h);
    l.query_weight = weights(h, h);
    l.query_bias = zeros(h);
    l.key_weight = weights(h, h);
    l.key_bias = zeros(h);
    l.value_weight = weights(h, h);
    l.value_bias = zeros(h);
    l.output_weight = weights(h, h);
    l.output_bias = zeros(h);
    l.ffn_norm_gain = ones(h);
    l.ffn_norm_bias = zeros(h);
    l.ffn_in_weight = weights(h, f);
    l.ffn_in_bias = zeros(f);
    l.ffn_out_weight = weights(f, h);
    l.ffn_out_bias = zeros(h);
    p.layers.push_back(std::move(l));
  }
  p.final_norm_gain = ones(h);
  p.final_norm_bias = zeros(h);
  p.sequence_head_weight = weights(h, 2);
  p.sequence_head_bias = zeros(2);
  p.token_head_weight = weights(h, 3);
  p.token_head_bias = zeros(3);
  return p;
}

// Grows the token embedding table; existing rows are kept bit-exactly.
template <typename Scalar>
Parameters<Scalar> resize_embeddings(const Parameters<Scalar>& params, Index new_vocab_size,
                                     std::uint64_t seed, double stddev = kInitStddev) {
  const Index old = params.token_embeddings.rows();
  if (new_vocab_size < old) {
    throw ConfigError("cannot shrink embeddings from " + std::to_string(old) + " to " +
                      std::to_string(new_vocab_size) + " rows");
  }
  Parameters<Scalar> out = params;
  if (new_vocab_size == old) return out;
  Rng rng(seed);
  out.token_embeddings.resize(new_vocab_size, params.token_embeddings.cols());
  out.token_embeddings.topRows(old) = params.token_embeddings;
  for (Index r = old; r < new_vocab_size; ++r) {
    for (Index c = 0; c < out.token_embeddings.cols(); ++c) {
      out.token_embeddings(r, c) = static_cast<Scalar>(rng.truncated_normal(stddev));
    }
  }
  return out;
}

}  // namespace spellscan::model
