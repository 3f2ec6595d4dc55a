#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spellscan/errors.hpp"
#include "spellscan/model/parameters.hpp"
#include "spellscan/random.hpp"

namespace spellscan::model {

inline constexpr double kNormEpsilon = 1e-5;

template <typename Scalar>
struct NormCache {
  Matrix<Scalar> normalized;
  ColVector<Scalar> inv_std;
};

template <typename Scalar>
Matrix<Scalar> layer_norm(const Matrix<Scalar>& x, const RowVector<Scalar>& gain,
                          const RowVector<Scalar>& bias, NormCache<Scalar>& cache) {
  const ColVector<Scalar> mean = x.rowwise().mean();
  const Matrix<Scalar> centered = x.colwise() - mean;
  const ColVector<Scalar> var = centered.array().square().rowwise().mean().matrix();
  cache.inv_std = (var.array() + Scalar(kNormEpsilon)).rsqrt().matrix();
  cache.normalized = centered.array().colwise() * cache.inv_std.array();
  return (cache.normalized.array().rowwise() * gain.array()).rowwise() + bias.array();
}

template <typename Scalar>
Matrix<Scalar> layer_norm_backward(const Matrix<Scalar>& dy, const NormCache<Scalar>& cache,
                                   const RowVector<Scalar>& gain, RowVector<Scalar>& d_gain,
                                   RowVector<Scalar>& d_bias) {
  d_gain += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  d_bias += dy.colwise().sum();
  const Matrix<Scalar> dxhat = dy.array().rowwise() * gain.array();
  const ColVector<Scalar> mean_d = dxhat.rowwise().mean();
  const ColVector<Scalar> mean_dx = (dxhat.array() * cache.normalized.array()).rowwise().mean().matrix();
  return ((dxhat.array().colwise() - mean_d.array()) -
          cache.normalized.array().colwise() * mean_dx.array())
             .colwise() *
         cache.inv_std.array();
}

template <typename Scalar>
Scalar gelu(Scalar x) {
  using std::erf;
  return Scalar(0.5) * x * (Scalar(1) + erf(x * Scalar(std::numbers::sqrt2 / 2)));
}

template <typename Scalar>
Scalar gelu_grad(Scalar x) {
  using std::erf;
  using std::exp;
  const Scalar cdf = Scalar(0.5) * (Scalar(1) + erf(x * Scalar(std::numbers::sqrt2 / 2)));
  const Scalar pdf = exp(Scalar(-0.5) * x * x) * Scalar(0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
  return cdf + x * pdf;
}

template <typename Scalar>
void softmax_rows(Matrix<Scalar>& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const Scalar mx = row.maxCoeff();
    row = (row.array() - mx).exp().matrix();
    row /= row.sum();
  }
}

template <typename Scalar>
struct LayerCache {
  Matrix<Scalar> input;
  NormCache<Scalar> attn_norm;
  Matrix<Scalar> attn_in;
  Matrix<Scalar> query, key, value;
  std::vector<Matrix<Scalar>> attention;  // per head: positions x real keys, rows sum to 1
  Matrix<Scalar> context;
  Matrix<Scalar> attn_dropout;  // empty when dropout is inactive
  Matrix<Scalar> mid;
  NormCache<Scalar> ffn_norm;
  Matrix<Scalar> ffn_in;
  Matrix<Scalar> ffn_pre;
  Matrix<Scalar> ffn_act;
  Matrix<Scalar> ffn_dropout;
};

template <typename Scalar>
struct EncoderCache {
  std::vector<int> ids;
  Index real_length = 0;
  Matrix<Scalar> embedded;  // token + position embeddings fed to the first block
  std::vector<LayerCache<Scalar>> layers;
  NormCache<Scalar> final_norm;
  Matrix<Scalar> output;
};

namespace detail {

template <typename Scalar>
Matrix<Scalar> dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  Matrix<Scalar> mask(rows, cols);
  const Scalar keep = Scalar(1.0 / (1.0 - rate));
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < rate ? Scalar(0) : keep;
  return mask;
}

template <typename Scalar>
Matrix<Scalar> block_forward(const LayerParameters<Scalar>& l, const ModelConfig& cfg, const Matrix<Scalar>& x,
                             Index real_length, LayerCache<Scalar>& c, Rng* dropout_rng) {
  const Index positions = x.rows();
  const Index d = cfg.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(d));
  const bool drop = dropout_rng != nullptr && cfg.dropout > 0.0;

  c.input = x;
  c.attn_in = layer_norm(x, l.attn_norm_gain, l.attn_norm_bias, c.attn_norm);
  c.query = (c.attn_in * l.query_weight).rowwise() + l.query_bias;
  c.key = (c.attn_in * l.key_weight).rowwise() + l.key_bias;
  c.value = (c.attn_in * l.value_weight).rowwise() + l.value_bias;
  c.context.setZero(positions, cfg.hidden);
  c.attention.resize(static_cast<std::size_t>(cfg.heads));
  for (Index h = 0; h < cfg.heads; ++h) {
    // Keys and values are restricted to real positions: the additive -inf
    // mask on padded columns, applied structurally.
    Matrix<Scalar> scores =
        (c.query.middleCols(h * d, d) * c.key.block(0, h * d, real_length, d).transpose()) * scale;
    softmax_rows(scores);
    c.context.middleCols(h * d, d) = scores * c.value.block(0, h * d, real_length, d);
    c.attention[static_cast<std::size_t>(h)] = std::move(scores);
  }
  Matrix<Scalar> attn_out = (c.context * l.output_weight).rowwise() + l.output_bias;
  if (drop) {
    c.attn_dropout = dropout_mask<Scalar>(positions, cfg.hidden, cfg.dropout, *dropout_rng);
    attn_out = attn_out.cwiseProduct(c.attn_dropout);
  } else {
    c.attn_dropout.resize(0, 0);
  }
  c.mid = x + attn_out;

  c.ffn_in = layer_norm(c.mid, l.ffn_norm_gain, l.ffn_norm_bias, c.ffn_norm);
  c.ffn_pre = (c.ffn_in * l.ffn_in_weight).rowwise() + l.ffn_in_bias;
  c.ffn_act = c.ffn_pre.unaryExpr([](Scalar v) { return gelu(v); });
  Matrix<Scalar> ffn_out = (c.ffn_act * l.ffn_out_weight).rowwise() + l.ffn_out_bias;
  if (drop) {
    c.ffn_dropout = dropout_mask<Scalar>(positions, cfg.hidden, cfg.dropout, *dropout_rng);
    ffn_out = ffn_out.cwiseProduct(c.ffn_dropout);
  } else {
    c.ffn_dropout.resize(0, 0);
  }
  return c.mid + ffn_out;
}

template <typename Scalar>
Matrix<Scalar> block_backward(const LayerParameters<Scalar>& l, const ModelConfig& cfg,
                              const LayerCache<Scalar>& c, Index real_length, const Matrix<Scalar>& dy,
                              LayerParameters<Scalar>& g) {
  const Index positions = dy.rows();
  const Index d = cfg.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(d));

  // Feed-forward branch.
  Matrix<Scalar> d_mid = dy;
  const Matrix<Scalar> d_ffn_out = c.ffn_dropout.size() ? dy.cwiseProduct(c.ffn_dropout) : dy;
  g.ffn_out_weight.noalias() += c.ffn_act.transpose() * d_ffn_out;
  g.ffn_out_bias += d_ffn_out.colwise().sum();
  const Matrix<Scalar> d_act = d_ffn_out * l.ffn_out_weight.transpose();
  const Matrix<Scalar> d_pre = d_act.cwiseProduct(c.ffn_pre.unaryExpr([](Scalar v) { return gelu_grad(v); }));
  g.ffn_in_weight.noalias() += c.ffn_in.transpose() * d_pre;
  g.ffn_in_bias += d_pre.colwise().sum();
  const Matrix<Scalar> d_ffn_in = d_pre * l.ffn_in_weight.transpose();
  d_mid += layer_norm_backward(d_ffn_in, c.ffn_norm, l.ffn_norm_gain, g.ffn_norm_gain, g.ffn_norm_bias);

  // Attention branch.
  Matrix<Scalar> d_input = d_mid;
  const Matrix<Scalar> d_attn_out = c.attn_dropout.size() ? d_mid.cwiseProduct(c.attn_dropout) : d_mid;
  g.output_weight.noalias() += c.context.transpose() * d_attn_out;
  g.output_bias += d_attn_out.colwise().sum();
  const Matrix<Scalar> d_context = d_attn_out * l.output_weight.transpose();

  Matrix<Scalar> dq = Matrix<Scalar>::Zero(positions, cfg.hidden);
  Matrix<Scalar> dk = Matrix<Scalar>::Zero(positions, cfg.hidden);
  Matrix<Scalar> dv = Matrix<Scalar>::Zero(positions, cfg.hidden);
  for (Index h = 0; h < cfg.heads; ++h) {
    const Matrix<Scalar>& probs = c.attention[static_cast<std::size_t>(h)];
    const Matrix<Scalar> d_out = d_context.middleCols(h * d, d);
    dv.block(0, h * d, real_length, d).noalias() += probs.transpose() * d_out;
    const Matrix<Scalar> d_probs = d_out * c.value.block(0, h * d, real_length, d).transpose();
    const ColVector<Scalar> row_dot = (d_probs.array() * probs.array()).rowwise().sum().matrix();
    const Matrix<Scalar> d_scores =
        (probs.array() * (d_probs.array().colwise() - row_dot.array())).matrix() * scale;
    dq.middleCols(h * d, d).noalias() += d_scores * c.key.block(0, h * d, real_length, d);
    dk.block(0, h * d, real_length, d).noalias() += d_scores.transpose() * c.query.middleCols(h * d, d);
  }
  g.query_weight.noalias() += c.attn_in.transpose() * dq;
  g.query_bias += dq.colwise().sum();
  g.key_weight.noalias() += c.attn_in.transpose() * dk;
  g.key_bias += dk.colwise().sum();
  g.value_weight.noalias() += c.attn_in.transpose() * dv;
  g.value_bias += dv.colwise().sum();
  Matrix<Scalar> d_attn_in = dq * l.query_weight.transpose();
  d_attn_in.noalias() += dk * l.key_weight.transpose();
  d_attn_in.noalias() += dv * l.value_weight.transpose();
  d_input += layer_norm_backward(d_attn_in, c.attn_norm, l.attn_norm_gain, g.attn_norm_gain, g.attn_norm_bias);
  return d_input;
}

}  // namespace detail

// Runs the encoder over `ids` (one row per position). Only the first
// `real_length` positions are attended to; rows past it are padding whose
// outputs are computed but never influence real rows. Pass a generator to
// enable dropout (training); nullptr is deterministic inference.
template <typename Scalar>
const Matrix<Scalar>& encode(const Parameters<Scalar>& p, const ModelConfig& cfg, std::span<const int> ids,
                             Index real_length, EncoderCache<Scalar>& cache, Rng* dropout_rng = nullptr) {
  const auto positions = static_cast<Index>(ids.size());
  if (positions == 0 || real_length < 1 || real_length > positions) {
    throw InputError("encoder input needs at least one real position");
  }
  if (positions > p.position_embeddings.rows()) {
    throw InputError("sequence of " + std::to_string(positions) + " positions exceeds max_positions " +
                     std::to_string(p.position_embeddings.rows()));
  }
  cache.ids.assign(ids.begin(), ids.end());
  cache.real_length = real_length;
  cache.embedded.resize(positions, cfg.hidden);
  for (Index t = 0; t < positions; ++t) {
    const int id = ids[static_cast<std::size_t>(t)];
    if (id < 0 || id >= p.token_embeddings.rows()) {
      throw InputError("token id " + std::to_string(id) + " out of range for vocabulary of " +
                       std::to_string(p.token_embeddings.rows()));
    }
    cache.embedded.row(t) = p.token_embeddings.row(id) + p.position_embeddings.row(t);
  }
  if (cfg.bag_of_embeddings) {
    cache.layers.clear();
    cache.output = cache.embedded;
    return cache.output;
  }
  cache.layers.resize(p.layers.size());
  Matrix<Scalar> x = cache.embedded;
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    x = detail::block_forward(p.layers[i], cfg, x, real_length, cache.layers[i], dropout_rng);
  }
  cache.output = layer_norm(x, p.final_norm_gain, p.final_norm_bias, cache.final_norm);
  return cache.output;
}

// Accumulates parameter gradients for d(loss)/d(output) into `grads` and
// returns d(loss)/d(embedded input).
template <typename Scalar>
Matrix<Scalar> encode_backward(const Parameters<Scalar>& p, const ModelConfig& cfg, const EncoderCache<Scalar>& cache,
                               const Matrix<Scalar>& d_output, Parameters<Scalar>& grads) {
  Matrix<Scalar> dx;
  if (cfg.bag_of_embeddings) {
    dx = d_output;
  } else {
    dx = layer_norm_backward(d_output, cache.final_norm, p.final_norm_gain, grads.final_norm_gain,
                             grads.final_norm_bias);
    for (std::size_t i = p.layers.size(); i-- > 0;) {
      dx = detail::block_backward(p.layers[i], cfg, cache.layers[i], cache.real_length, dx, grads.layers[i]);
    }
  }
  for (Index t = 0; t < dx.rows(); ++t) {
    grads.token_embeddings.row(cache.ids[static_cast<std::size_t>(t)]) += dx.row(t);
    grads.position_embeddings.row(t) += dx.row(t);
  }
  return dx;
}

}  // namespace spellscan::model
