#include "torivec/layers.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace torivec {

namespace {

void check_rank3(const std::vector<int>& shape, const char* who) {
  if (shape.size() != 3) {
    throw std::invalid_argument(std::string(who) + ": expected rank-3 input, got " +
                                shape_to_string(shape));
  }
}

}  // namespace

template <typename S>
void init_glorot_uniform(TensorT<S>& w, int fan_in, int fan_out, Rng& rng) {
  double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (std::int64_t i = 0; i < w.size(); ++i) {
    w[i] = static_cast<S>(rng.uniform(-bound, bound));
  }
}

// ---------------------------------------------------------------- Conv1d

template <typename S>
Conv1d<S>::Conv1d(int in_channels, int out_channels, int kernel)
    : weight({out_channels, in_channels, kernel}),
      bias({out_channels}),
      grad_weight({out_channels, in_channels, kernel}),
      grad_bias({out_channels}),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw std::invalid_argument("conv1d: kernel must be odd and positive");
  }
}

template <typename S>
TensorT<S> Conv1d<S>::forward(const TensorT<S>& input) {
  check_rank3(input.shape(), "conv1d");
  if (input.dim(1) != in_channels_) {
    throw std::invalid_argument("conv1d: input has " + std::to_string(input.dim(1)) +
                                " channels, layer expects " + std::to_string(in_channels_));
  }
  input_ = input;
  const int n_batch = input.dim(0), t_len = input.dim(2);
  const int pad = (kernel_ - 1) / 2;
  TensorT<S> out({n_batch, out_channels_, t_len});

#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int co = 0; co < out_channels_; ++co) {
      S* out_row = &out.at(n, co, 0);
      const S b = bias[co];
      for (int t = 0; t < t_len; ++t) out_row[t] = b;
      for (int ci = 0; ci < in_channels_; ++ci) {
        const S* in_row = &input.at(n, ci, 0);
        const S* w_row = &weight.at(co, ci, 0);
        for (int k = 0; k < kernel_; ++k) {
          const S w = w_row[k];
          const int shift = k - pad;
          const int t0 = std::max(0, -shift);
          const int t1 = std::min(t_len, t_len - shift);
          for (int t = t0; t < t1; ++t) out_row[t] += w * in_row[t + shift];
        }
      }
    }
  }
  return out;
}

template <typename S>
TensorT<S> Conv1d<S>::backward(const TensorT<S>& grad_out) {
  const int n_batch = input_.dim(0), t_len = input_.dim(2);
  if (grad_out.shape() != std::vector<int>{n_batch, out_channels_, t_len}) {
    throw std::invalid_argument("conv1d backward: grad shape " +
                                shape_to_string(grad_out.shape()) + " does not match output");
  }
  const int pad = (kernel_ - 1) / 2;
  TensorT<S> grad_in({n_batch, in_channels_, t_len});

#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int ci = 0; ci < in_channels_; ++ci) {
      S* gin_row = &grad_in.at(n, ci, 0);
      for (int co = 0; co < out_channels_; ++co) {
        const S* gout_row = &grad_out.at(n, co, 0);
        const S* w_row = &weight.at(co, ci, 0);
        for (int k = 0; k < kernel_; ++k) {
          const S w = w_row[k];
          const int shift = pad - k;
          const int t0 = std::max(0, -shift);
          const int t1 = std::min(t_len, t_len - shift);
          for (int t = t0; t < t1; ++t) gin_row[t] += w * gout_row[t + shift];
        }
      }
    }
  }

  // Each (co,ci) pair owns its kernel slice, so threads never share an output.
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < out_channels_; ++co) {
    for (int ci = 0; ci < in_channels_; ++ci) {
      S* gw = &grad_weight.at(co, ci, 0);
      for (int n = 0; n < n_batch; ++n) {
        const S* gout_row = &grad_out.at(n, co, 0);
        const S* in_row = &input_.at(n, ci, 0);
        for (int k = 0; k < kernel_; ++k) {
          const int shift = k - pad;
          const int t0 = std::max(0, -shift);
          const int t1 = std::min(t_len, t_len - shift);
          S acc = 0;
          for (int t = t0; t < t1; ++t) acc += gout_row[t] * in_row[t + shift];
          gw[k] += acc;
        }
      }
    }
  }

#pragma omp parallel for schedule(static)
  for (int co = 0; co < out_channels_; ++co) {
    S acc = 0;
    for (int n = 0; n < n_batch; ++n) {
      const S* gout_row = &grad_out.at(n, co, 0);
      for (int t = 0; t < t_len; ++t) acc += gout_row[t];
    }
    grad_bias[co] += acc;
  }
  return grad_in;
}

template <typename S>
void Conv1d<S>::collect(const std::string& prefix, std::vector<ParamSlot<S>>& out) {
  out.push_back({prefix + ".weight", &weight, &grad_weight});
  out.push_back({prefix + ".bias", &bias, &grad_bias});
}

// ------------------------------------------------------------ BatchNorm1d

template <typename S>
BatchNorm1d<S>::BatchNorm1d(int channels)
    : gamma(TensorT<S>::full({channels}, S(1))),
      beta({channels}),
      grad_gamma({channels}),
      grad_beta({channels}),
      running_mean({channels}),
      running_var({channels}),
      channels_(channels) {}

template <typename S>
TensorT<S> BatchNorm1d<S>::forward(const TensorT<S>& input) {
  check_rank3(input.shape(), "batchnorm1d");
  if (input.dim(1) != channels_) {
    throw std::invalid_argument("batchnorm1d: channel mismatch");
  }
  const int n_batch = input.dim(0), t_len = input.dim(2);
  const std::int64_t m = static_cast<std::int64_t>(n_batch) * t_len;
  TensorT<S> out(input.shape());

  if (train_) {
    xhat_ = TensorT<S>(input.shape());
    inv_std_.assign(static_cast<std::size_t>(channels_), 0.0);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < channels_; ++c) {
      double sum = 0.0, sq_sum = 0.0;
      for (int n = 0; n < n_batch; ++n) {
        const S* row = &input.at(n, c, 0);
        for (int t = 0; t < t_len; ++t) {
          double v = static_cast<double>(row[t]);
          sum += v;
          sq_sum += v * v;
        }
      }
      const double mean = sum / static_cast<double>(m);
      const double var = std::max(0.0, sq_sum / static_cast<double>(m) - mean * mean);
      const double inv_std = 1.0 / std::sqrt(var + kEpsilon);
      inv_std_[static_cast<std::size_t>(c)] = inv_std;

      const double g = static_cast<double>(gamma[c]);
      const double b = static_cast<double>(beta[c]);
      for (int n = 0; n < n_batch; ++n) {
        const S* row = &input.at(n, c, 0);
        S* xh_row = &xhat_.at(n, c, 0);
        S* out_row = &out.at(n, c, 0);
        for (int t = 0; t < t_len; ++t) {
          double xh = (static_cast<double>(row[t]) - mean) * inv_std;
          xh_row[t] = static_cast<S>(xh);
          out_row[t] = static_cast<S>(g * xh + b);
        }
      }

      // Running estimates track the unbiased batch variance.
      const double unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1)
                                    : var;
      running_mean[c] = static_cast<S>((1.0 - kMomentum) * static_cast<double>(running_mean[c]) +
                                       kMomentum * mean);
      running_var[c] = static_cast<S>((1.0 - kMomentum) * static_cast<double>(running_var[c]) +
                                      kMomentum * unbiased);
    }
    initialized = true;
  } else {
    if (!initialized) {
      throw std::runtime_error("batchnorm1d: eval mode before any train-mode update");
    }
#pragma omp parallel for schedule(static)
    for (int c = 0; c < channels_; ++c) {
      const double mean = static_cast<double>(running_mean[c]);
      const double inv_std = 1.0 / std::sqrt(static_cast<double>(running_var[c]) + kEpsilon);
      const double g = static_cast<double>(gamma[c]);
      const double b = static_cast<double>(beta[c]);
      for (int n = 0; n < n_batch; ++n) {
        const S* row = &input.at(n, c, 0);
        S* out_row = &out.at(n, c, 0);
        for (int t = 0; t < t_len; ++t) {
          out_row[t] = static_cast<S>(g * (static_cast<double>(row[t]) - mean) * inv_std + b);
        }
      }
    }
  }
  return out;
}

template <typename S>
TensorT<S> BatchNorm1d<S>::backward(const TensorT<S>& grad_out) {
  if (!train_) throw std::runtime_error("batchnorm1d: backward in eval mode");
  if (!grad_out.same_shape(xhat_)) {
    throw std::invalid_argument("batchnorm1d backward: grad shape mismatch");
  }
  const int n_batch = grad_out.dim(0), t_len = grad_out.dim(2);
  const double m = static_cast<double>(static_cast<std::int64_t>(n_batch) * t_len);
  TensorT<S> grad_in(grad_out.shape());

#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels_; ++c) {
    double g_sum = 0.0, gx_sum = 0.0;
    for (int n = 0; n < n_batch; ++n) {
      const S* g_row = &grad_out.at(n, c, 0);
      const S* xh_row = &xhat_.at(n, c, 0);
      for (int t = 0; t < t_len; ++t) {
        g_sum += static_cast<double>(g_row[t]);
        gx_sum += static_cast<double>(g_row[t]) * static_cast<double>(xh_row[t]);
      }
    }
    grad_gamma[c] += static_cast<S>(gx_sum);
    grad_beta[c] += static_cast<S>(g_sum);

    const double scale = static_cast<double>(gamma[c]) * inv_std_[static_cast<std::size_t>(c)] / m;
    for (int n = 0; n < n_batch; ++n) {
      const S* g_row = &grad_out.at(n, c, 0);
      const S* xh_row = &xhat_.at(n, c, 0);
      S* gi_row = &grad_in.at(n, c, 0);
      for (int t = 0; t < t_len; ++t) {
        double term = m * static_cast<double>(g_row[t]) - g_sum -
                      static_cast<double>(xh_row[t]) * gx_sum;
        gi_row[t] = static_cast<S>(scale * term);
      }
    }
  }
  return grad_in;
}

template <typename S>
void BatchNorm1d<S>::collect(const std::string& prefix, std::vector<ParamSlot<S>>& out) {
  out.push_back({prefix + ".gamma", &gamma, &grad_gamma});
  out.push_back({prefix + ".beta", &beta, &grad_beta});
}

// -------------------------------------------------------------- MaxPool1d

template <typename S>
MaxPool1d<S>::MaxPool1d(int window) : window_(window) {
  if (window < 1) throw std::invalid_argument("maxpool1d: window must be >= 1");
}

template <typename S>
TensorT<S> MaxPool1d<S>::forward(const TensorT<S>& input) {
  check_rank3(input.shape(), "maxpool1d");
  const int n_batch = input.dim(0), channels = input.dim(1), t_len = input.dim(2);
  const int t_out = t_len / window_;
  if (t_out < 1) {
    throw std::runtime_error("maxpool1d: input length " + std::to_string(t_len) +
                             " shorter than window " + std::to_string(window_));
  }
  in_shape_ = input.shape();
  TensorT<S> out({n_batch, channels, t_out});
  argmax_.assign(static_cast<std::size_t>(out.size()), 0);

#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      const S* in_row = &input.at(n, c, 0);
      S* out_row = &out.at(n, c, 0);
      int* arg_row = &argmax_[(static_cast<std::size_t>(n) * channels + c) * t_out];
      for (int to = 0; to < t_out; ++to) {
        int base = to * window_;
        S best = in_row[base];
        int best_t = base;
        for (int k = 1; k < window_; ++k) {
          // strict comparison keeps the first argmax on ties
          if (in_row[base + k] > best) {
            best = in_row[base + k];
            best_t = base + k;
          }
        }
        out_row[to] = best;
        arg_row[to] = best_t;
      }
    }
  }
  return out;
}

template <typename S>
TensorT<S> MaxPool1d<S>::backward(const TensorT<S>& grad_out) {
  const int n_batch = in_shape_[0], channels = in_shape_[1];
  const int t_out = in_shape_[2] / window_;
  if (grad_out.shape() != std::vector<int>{n_batch, channels, t_out}) {
    throw std::invalid_argument("maxpool1d backward: grad shape mismatch");
  }
  TensorT<S> grad_in(in_shape_);
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      const S* g_row = &grad_out.at(n, c, 0);
      S* gi_row = &grad_in.at(n, c, 0);
      const int* arg_row = &argmax_[(static_cast<std::size_t>(n) * channels + c) * t_out];
      for (int to = 0; to < t_out; ++to) gi_row[arg_row[to]] += g_row[to];
    }
  }
  return grad_in;
}

// ------------------------------------------------------------------- ReLU

template <typename S>
TensorT<S> ReLU<S>::forward(const TensorT<S>& input) {
  input_ = input;
  TensorT<S> out(input.shape());
  const S* in = input.data();
  S* o = out.data();
  const std::int64_t n = input.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) o[i] = in[i] > S(0) ? in[i] : S(0);
  return out;
}

template <typename S>
TensorT<S> ReLU<S>::backward(const TensorT<S>& grad_out) {
  if (!grad_out.same_shape(input_)) {
    throw std::invalid_argument("relu backward: grad shape mismatch");
  }
  TensorT<S> grad_in(input_.shape());
  const S* in = input_.data();
  const S* g = grad_out.data();
  S* gi = grad_in.data();
  const std::int64_t n = input_.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) gi[i] = in[i] > S(0) ? g[i] : S(0);
  return grad_in;
}

// ----------------------------------------------------------------- Linear

template <typename S>
Linear<S>::Linear(int in_features, int out_features)
    : weight({out_features, in_features}),
      bias({out_features}),
      grad_weight({out_features, in_features}),
      grad_bias({out_features}),
      in_features_(in_features),
      out_features_(out_features) {}

template <typename S>
TensorT<S> Linear<S>::forward(const TensorT<S>& input) {
  if (input.rank() != 2 || input.dim(1) != in_features_) {
    throw std::invalid_argument("linear: expected input [N," + std::to_string(in_features_) +
                                "], got " + shape_to_string(input.shape()));
  }
  input_ = input;
  const int n_batch = input.dim(0);
  TensorT<S> out({n_batch, out_features_});
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int o = 0; o < out_features_; ++o) {
      const S* in_row = &input.at(n, 0);
      const S* w_row = &weight.at(o, 0);
      S acc = bias[o];
      for (int i = 0; i < in_features_; ++i) acc += w_row[i] * in_row[i];
      out.at(n, o) = acc;
    }
  }
  return out;
}

template <typename S>
TensorT<S> Linear<S>::backward(const TensorT<S>& grad_out) {
  const int n_batch = input_.dim(0);
  if (grad_out.shape() != std::vector<int>{n_batch, out_features_}) {
    throw std::invalid_argument("linear backward: grad shape mismatch");
  }
  TensorT<S> grad_in({n_batch, in_features_});
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int i = 0; i < in_features_; ++i) {
      S acc = 0;
      for (int o = 0; o < out_features_; ++o) acc += weight.at(o, i) * grad_out.at(n, o);
      grad_in.at(n, i) = acc;
    }
  }
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out_features_; ++o) {
    S* gw_row = &grad_weight.at(o, 0);
    S gb = 0;
    for (int n = 0; n < n_batch; ++n) {
      const S g = grad_out.at(n, o);
      const S* in_row = &input_.at(n, 0);
      for (int i = 0; i < in_features_; ++i) gw_row[i] += g * in_row[i];
      gb += g;
    }
    grad_bias[o] += gb;
  }
  return grad_in;
}

template <typename S>
void Linear<S>::collect(const std::string& prefix, std::vector<ParamSlot<S>>& out) {
  out.push_back({prefix + ".weight", &weight, &grad_weight});
  out.push_back({prefix + ".bias", &bias, &grad_bias});
}

// ------------------------------------------------------- ContextAttention

template <typename S>
ContextAttention<S>::ContextAttention(int dim, int heads)
    : proj_weight({dim, dim}),
      proj_bias({dim}),
      context({std::max(heads, 1), dim / std::max(heads, 1)}),
      grad_proj_weight({dim, dim}),
      grad_proj_bias({dim}),
      grad_context({std::max(heads, 1), dim / std::max(heads, 1)}),
      dim_(dim),
      heads_(heads),
      head_dim_(dim / std::max(heads, 1)) {
  if (heads < 1 || dim % heads != 0) {
    throw std::invalid_argument("context_attention: dim " + std::to_string(dim) +
                                " not divisible by heads " + std::to_string(heads));
  }
}

template <typename S>
TensorT<S> ContextAttention<S>::forward(const TensorT<S>& input) {
  check_rank3(input.shape(), "context_attention");
  if (input.dim(2) != dim_) {
    throw std::invalid_argument("context_attention: feature dim mismatch");
  }
  const int n_batch = input.dim(0), t_len = input.dim(1);
  input_ = input;
  keys_ = TensorT<S>({n_batch, t_len, dim_});
  alpha_ = TensorT<S>({n_batch, heads_, t_len});
  TensorT<S> out({n_batch, dim_});

#pragma omp parallel for schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int t = 0; t < t_len; ++t) {
      const S* x = &input.at(n, t, 0);
      S* k = &keys_.at(n, t, 0);
      for (int i = 0; i < dim_; ++i) {
        const S* w_row = &proj_weight.at(i, 0);
        S acc = proj_bias[i];
        for (int j = 0; j < dim_; ++j) acc += w_row[j] * x[j];
        k[i] = static_cast<S>(std::tanh(static_cast<double>(acc)));
      }
    }
    for (int h = 0; h < heads_; ++h) {
      S* a = &alpha_.at(n, h, 0);
      const S* u = &context.at(h, 0);
      double max_score = -1e300;
      for (int t = 0; t < t_len; ++t) {
        const S* k = &keys_.at(n, t, h * head_dim_);
        double score = 0.0;
        for (int j = 0; j < head_dim_; ++j) {
          score += static_cast<double>(u[j]) * static_cast<double>(k[j]);
        }
        a[t] = static_cast<S>(score);
        max_score = std::max(max_score, score);
      }
      double denom = 0.0;
      for (int t = 0; t < t_len; ++t) {
        double e = std::exp(static_cast<double>(a[t]) - max_score);
        a[t] = static_cast<S>(e);
        denom += e;
      }
      for (int t = 0; t < t_len; ++t) a[t] = static_cast<S>(static_cast<double>(a[t]) / denom);

      S* o = &out.at(n, h * head_dim_);
      for (int j = 0; j < head_dim_; ++j) o[j] = 0;
      for (int t = 0; t < t_len; ++t) {
        const S* x = &input.at(n, t, h * head_dim_);
        const S w = a[t];
        for (int j = 0; j < head_dim_; ++j) o[j] += w * x[j];
      }
    }
  }
  return out;
}

template <typename S>
TensorT<S> ContextAttention<S>::backward(const TensorT<S>& grad_out) {
  const int n_batch = input_.dim(0), t_len = input_.dim(1);
  if (grad_out.shape() != std::vector<int>{n_batch, dim_}) {
    throw std::invalid_argument("context_attention backward: grad shape mismatch");
  }
  TensorT<S> grad_in({n_batch, t_len, dim_});
  TensorT<S> grad_pre({n_batch, t_len, dim_});   // grad wrt pre-tanh activations
  TensorT<S> grad_score({n_batch, heads_, t_len});

  // Per-item pieces first (threads own disjoint n), parameter reductions after.
#pragma omp parallel for schedule(static)
  for (int n = 0; n < n_batch; ++n) {
    for (int h = 0; h < heads_; ++h) {
      const S* g = &grad_out.at(n, h * head_dim_);
      const S* a = &alpha_.at(n, h, 0);
      const S* u = &context.at(h, 0);

      double weighted = 0.0;  // sum_t alpha_t * dL/dalpha_t
      std::vector<double> dalpha(static_cast<std::size_t>(t_len));
      for (int t = 0; t < t_len; ++t) {
        const S* x = &input_.at(n, t, h * head_dim_);
        double da = 0.0;
        for (int j = 0; j < head_dim_; ++j) {
          da += static_cast<double>(g[j]) * static_cast<double>(x[j]);
        }
        dalpha[static_cast<std::size_t>(t)] = da;
        weighted += static_cast<double>(a[t]) * da;
      }
      for (int t = 0; t < t_len; ++t) {
        double ds = static_cast<double>(a[t]) * (dalpha[static_cast<std::size_t>(t)] - weighted);
        grad_score.at(n, h, t) = static_cast<S>(ds);

        S* gx = &grad_in.at(n, t, h * head_dim_);
        S* gp = &grad_pre.at(n, t, h * head_dim_);
        const S* k = &keys_.at(n, t, h * head_dim_);
        for (int j = 0; j < head_dim_; ++j) {
          gx[j] += a[t] * g[j];  // direct value path
          double dk = ds * static_cast<double>(u[j]);
          double kk = static_cast<double>(k[j]);
          gp[j] = static_cast<S>(dk * (1.0 - kk * kk));
        }
      }
    }
    // key path back through the projection: dx += W^T dpre
    for (int t = 0; t < t_len; ++t) {
      const S* gp = &grad_pre.at(n, t, 0);
      S* gx = &grad_in.at(n, t, 0);
      for (int j = 0; j < dim_; ++j) {
        S acc = 0;
        for (int i = 0; i < dim_; ++i) acc += proj_weight.at(i, j) * gp[i];
        gx[j] += acc;
      }
    }
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < dim_; ++i) {
    S* gw_row = &grad_proj_weight.at(i, 0);
    S gb = 0;
    for (int n = 0; n < n_batch; ++n) {
      for (int t = 0; t < t_len; ++t) {
        const S gp = grad_pre.at(n, t, i);
        const S* x = &input_.at(n, t, 0);
        for (int j = 0; j < dim_; ++j) gw_row[j] += gp * x[j];
        gb += gp;
      }
    }
    grad_proj_bias[i] += gb;
  }

#pragma omp parallel for schedule(static)
  for (int h = 0; h < heads_; ++h) {
    S* gu = &grad_context.at(h, 0);
    for (int n = 0; n < n_batch; ++n) {
      for (int t = 0; t < t_len; ++t) {
        const S ds = grad_score.at(n, h, t);
        const S* k = &keys_.at(n, t, h * head_dim_);
        for (int j = 0; j < head_dim_; ++j) gu[j] += ds * k[j];
      }
    }
  }
  return grad_in;
}

template <typename S>
void ContextAttention<S>::collect(const std::string& prefix, std::vector<ParamSlot<S>>& out) {
  out.push_back({prefix + ".proj_weight", &proj_weight, &grad_proj_weight});
  out.push_back({prefix + ".proj_bias", &proj_bias, &grad_proj_bias});
  out.push_back({prefix + ".context", &context, &grad_context});
}

template void init_glorot_uniform<float>(TensorT<float>&, int, int, Rng&);
template void init_glorot_uniform<double>(TensorT<double>&, int, int, Rng&);
template class Conv1d<float>;
template class Conv1d<double>;
template class BatchNorm1d<float>;
template class BatchNorm1d<double>;
template class MaxPool1d<float>;
template class MaxPool1d<double>;
template class ReLU<float>;
template class ReLU<double>;
template class Linear<float>;
template class Linear<double>;
template class ContextAttention<float>;
template class ContextAttention<double>;

}  // namespace torivec
