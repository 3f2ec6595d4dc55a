#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "spellscan/model/encoder.hpp"

namespace spellscan::model {

template <typename Scalar>
struct PoolCache {
  Pooling pooling = Pooling::cls;
  Index length = 0;
  std::vector<Index> argmax;  // MAX: source row per dimension
  RowVector<Scalar> pooled;
};

// Reduces the first `length` rows of `states` to one vector.
template <typename Scalar>
RowVector<Scalar> pool(const Matrix<Scalar>& states, Index length, Pooling pooling, PoolCache<Scalar>* cache = nullptr) {
  RowVector<Scalar> out(states.cols());
  std::vector<Index> argmax;
  switch (pooling) {
    case Pooling::cls:
      out = states.row(0);
      break;
    case Pooling::mean:
      out = states.topRows(length).colwise().sum() / Scalar(length);
      break;
    case Pooling::max:
      argmax.assign(static_cast<std::size_t>(states.cols()), 0);
      for (Index j = 0; j < states.cols(); ++j) {
        Index best = 0;
        for (Index t = 1; t < length; ++t) {
          if (states(t, j) > states(best, j)) best = t;
        }
        argmax[static_cast<std::size_t>(j)] = best;
        out(j) = states(best, j);
      }
      break;
  }
  if (cache) {
    cache->pooling = pooling;
    cache->length = length;
    cache->argmax = std::move(argmax);
    cache->pooled = out;
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> pool_backward(const PoolCache<Scalar>& cache, Index rows, const RowVector<Scalar>& d_pooled) {
  Matrix<Scalar> d_states = Matrix<Scalar>::Zero(rows, d_pooled.cols());
  switch (cache.pooling) {
    case Pooling::cls:
      d_states.row(0) = d_pooled;
      break;
    case Pooling::mean:
      for (Index t = 0; t < cache.length; ++t) d_states.row(t) = d_pooled / Scalar(cache.length);
      break;
    case Pooling::max:
      for (Index j = 0; j < d_pooled.cols(); ++j) d_states(cache.argmax[static_cast<std::size_t>(j)], j) = d_pooled(j);
      break;
  }
  return d_states;
}

template <typename Scalar>
RowVector<Scalar> sequence_logits(const Parameters<Scalar>& p, const Matrix<Scalar>& states, Index length,
                                  Pooling pooling, PoolCache<Scalar>* cache = nullptr) {
  return pool(states, length, pooling, cache) * p.sequence_head_weight + p.sequence_head_bias;
}

template <typename Scalar>
Matrix<Scalar> sequence_head_backward(const Parameters<Scalar>& p, const PoolCache<Scalar>& cache, Index rows,
                                      const RowVector<Scalar>& d_logits, Parameters<Scalar>& g) {
  g.sequence_head_weight.noalias() += cache.pooled.transpose() * d_logits;
  g.sequence_head_bias += d_logits;
  return pool_backward(cache, rows, RowVector<Scalar>(d_logits * p.sequence_head_weight.transpose()));
}

template <typename Scalar>
Matrix<Scalar> token_logits(const Parameters<Scalar>& p, const Matrix<Scalar>& states) {
  return (states * p.token_head_weight).rowwise() + p.token_head_bias;
}

template <typename Scalar>
Matrix<Scalar> token_head_backward(const Parameters<Scalar>& p, const Matrix<Scalar>& states,
                                   const Matrix<Scalar>& d_logits, Parameters<Scalar>& g) {
  g.token_head_weight.noalias() += states.transpose() * d_logits;
  g.token_head_bias += d_logits.colwise().sum();
  return d_logits * p.token_head_weight.transpose();
}

template <typename Scalar>
RowVector<Scalar> softmax(const RowVector<Scalar>& logits) {
  RowVector<Scalar> out = (logits.array() - logits.maxCoeff()).exp().matrix();
  return out / out.sum();
}

// -log softmax(logits)[target]; when `d_logits` is given it receives
// scale * d(loss)/d(logits).
template <typename Scalar>
Scalar cross_entropy(const RowVector<Scalar>& logits, int target, RowVector<Scalar>* d_logits = nullptr,
                     Scalar scale = Scalar(1)) {
  using std::exp;
  using std::log;
  const Scalar mx = logits.maxCoeff();
  const Scalar lse = mx + log((logits.array() - mx).exp().sum());
  if (d_logits) {
    *d_logits = (logits.array() - lse).exp().matrix() * scale;
    (*d_logits)(target) -= scale;
  }
  return lse - logits(target);
}

// Argmax with the lowest index winning ties.
template <typename Derived>
int argmax_lowest(const Eigen::MatrixBase<Derived>& row) {
  int best = 0;
  for (Index j = 1; j < row.size(); ++j) {
    if (row(j) > row(best)) best = static_cast<int>(j);
  }
  return best;
}

}  // namespace spellscan::model
