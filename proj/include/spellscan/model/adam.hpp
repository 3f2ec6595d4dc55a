#pragma once

#include <cmath>

#include "spellscan/model/parameters.hpp"

namespace spellscan::model {

// Adam with bias correction and a constant learning rate.
template <typename Scalar>
class Adam {
 public:
  Adam(const Parameters<Scalar>& like, const TrainConfig& cfg)
      : cfg_(cfg), m_(like.zeros_like()), v_(like.zeros_like()) {}

  void step(Parameters<Scalar>& params, const Parameters<Scalar>& grads) {
    ++t_;
    const Scalar b1 = Scalar(cfg_.beta1), b2 = Scalar(cfg_.beta2);
    const Scalar c1 = Scalar(1) - std::pow(b1, Scalar(t_));
    const Scalar c2 = Scalar(1) - std::pow(b2, Scalar(t_));
    const Scalar lr = Scalar(cfg_.learning_rate), eps = Scalar(cfg_.epsilon);
    auto pv = params.views();
    const auto gv = grads.views();
    auto mv = m_.views();
    auto vv = v_.views();
    for (std::size_t k = 0; k < pv.size(); ++k) {
      for (Index i = 0; i < pv[k].size(); ++i) {
        const Scalar g = gv[k].data[i];
        Scalar& m = mv[k].data[i];
        Scalar& v = vv[k].data[i];
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g * g;
        pv[k].data[i] -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
      }
    }
  }

  long steps() const { return t_; }

 private:
  TrainConfig cfg_;
  Parameters<Scalar> m_, v_;
  long t_ = 0;
};

}  // namespace spellscan::model
