#pragma once

#include <vector>

#include "torivec/layers.h"
#include "torivec/tensor.h"

namespace torivec {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Moment buffers are created on the first step and keyed
// by slot order, which therefore has to be stable across calls.
template <typename S>
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  void step(const std::vector<ParamSlot<S>>& slots);

  long step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<TensorT<S>>& first_moments() const { return m_; }
  const std::vector<TensorT<S>>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  long step_ = 0;
  std::vector<TensorT<S>> m_;
  std::vector<TensorT<S>> v_;
};

}  // namespace torivec
