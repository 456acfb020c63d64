#pragma once

#include <string>
#include <vector>

#include "torivec/rng.h"
#include "torivec/tensor.h"

namespace torivec {

// Named view of one trainable tensor and its gradient buffer. The optimizer
// and the checkpoint writer both consume slots in declaration order.
template <typename S>
struct ParamSlot {
  std::string name;
  TensorT<S>* value = nullptr;
  TensorT<S>* grad = nullptr;
};

// Glorot-uniform fill in +-sqrt(6 / (fan_in + fan_out)).
template <typename S>
void init_glorot_uniform(TensorT<S>& w, int fan_in, int fan_out, Rng& rng);

// 1D cross-correlation, stride 1, zero "same" padding; output length equals
// input length. Input [N,Cin,T] -> output [N,Cout,T].
template <typename S>
class Conv1d {
 public:
  Conv1d(int in_channels, int out_channels, int kernel);

  TensorT<S> forward(const TensorT<S>& input);
  // Accumulates into grad_weight / grad_bias and returns grad wrt input.
  TensorT<S> backward(const TensorT<S>& grad_out);

  void collect(const std::string& prefix, std::vector<ParamSlot<S>>& out);

  TensorT<S> weight;  // [Cout, Cin, K]
  TensorT<S> bias;    // [Cout]
  TensorT<S> grad_weight;
  TensorT<S> grad_bias;

  int in_channels() const { return in_channels_; }
  int out_channels() const { return out_channels_; }
  int kernel() const { return kernel_; }

 private:
  int in_channels_, out_channels_, kernel_;
  TensorT<S> input_;
};

// Per-channel normalization over (N,T) with learnable scale/shift. Train mode
// uses batch statistics and maintains running estimates; eval mode applies the
// running estimates and requires them to be initialized.
template <typename S>
class BatchNorm1d {
 public:
  explicit BatchNorm1d(int channels);

  TensorT<S> forward(const TensorT<S>& input);  // [N,C,T]
  TensorT<S> backward(const TensorT<S>& grad_out);

  void set_train(bool train) { train_ = train; }
  bool train_mode() const { return train_; }

  void collect(const std::string& prefix, std::vector<ParamSlot<S>>& out);

  TensorT<S> gamma, beta;
  TensorT<S> grad_gamma, grad_beta;
  TensorT<S> running_mean, running_var;
  bool initialized = false;  // set once train-mode statistics are committed

  static constexpr double kMomentum = 0.1;
  static constexpr double kEpsilon = 1e-5;

 private:
  int channels_;
  bool train_ = true;
  TensorT<S> xhat_;
  std::vector<double> inv_std_;
};

// Non-overlapping max pooling; trailing remainder frames are dropped.
// [N,C,T] -> [N,C,floor(T/window)].
template <typename S>
class MaxPool1d {
 public:
  explicit MaxPool1d(int window);

  TensorT<S> forward(const TensorT<S>& input);
  TensorT<S> backward(const TensorT<S>& grad_out);  // routes to first argmax

  int window() const { return window_; }

 private:
  int window_;
  std::vector<int> in_shape_;
  std::vector<int> argmax_;  // input t index per output element
};

// Elementwise max(0, x); subgradient 0 at the kink.
template <typename S>
class ReLU {
 public:
  TensorT<S> forward(const TensorT<S>& input);
  TensorT<S> backward(const TensorT<S>& grad_out);

 private:
  TensorT<S> input_;
};

// Affine map [N,Din] -> [N,Dout].
template <typename S>
class Linear {
 public:
  Linear(int in_features, int out_features);

  TensorT<S> forward(const TensorT<S>& input);
  TensorT<S> backward(const TensorT<S>& grad_out);

  void collect(const std::string& prefix, std::vector<ParamSlot<S>>& out);

  TensorT<S> weight;  // [Dout, Din]
  TensorT<S> bias;    // [Dout]
  TensorT<S> grad_weight;
  TensorT<S> grad_bias;

  int in_features() const { return in_features_; }
  int out_features() const { return out_features_; }

 private:
  int in_features_, out_features_;
  TensorT<S> input_;
};

// Attention pooling over time with learned per-head context queries:
// keys k_t = tanh(W x_t + b), per-head scores u_h . k_{h,t}, softmax over t,
// heads concatenated. [N,T,D] -> [N,D].
template <typename S>
class ContextAttention {
 public:
  ContextAttention(int dim, int heads);

  TensorT<S> forward(const TensorT<S>& input);
  TensorT<S> backward(const TensorT<S>& grad_out);

  void collect(const std::string& prefix, std::vector<ParamSlot<S>>& out);

  TensorT<S> proj_weight;  // [D, D]
  TensorT<S> proj_bias;    // [D]
  TensorT<S> context;      // [H, D/H]
  TensorT<S> grad_proj_weight;
  TensorT<S> grad_proj_bias;
  TensorT<S> grad_context;

  int dim() const { return dim_; }
  int heads() const { return heads_; }

 private:
  int dim_, heads_, head_dim_;
  TensorT<S> input_;  // [N,T,D]
  TensorT<S> keys_;   // [N,T,D], post-tanh
  TensorT<S> alpha_;  // [N,H,T]
};

}  // namespace torivec
