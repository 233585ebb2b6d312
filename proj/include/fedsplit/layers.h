/*
 * Copyright 2026 The FedSplit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSPLIT_LAYERS_H_
#define FEDSPLIT_LAYERS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedsplit/tensor.h"

namespace fedsplit {

enum class LayerKind { kConv1D, kDense, kReLU, kMaxPool1D, kFlatten };

std::string to_string(LayerKind kind);

// Static description of one layer. Shapes handled here are per-sample
// (no batch dimension): Conv1D/MaxPool1D consume [channels, length],
// Dense consumes [features], Flatten and ReLU accept any rank.
struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_size = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  std::size_t window = 0;

  static LayerSpec conv1d(std::size_t in_channels, std::size_t out_channels,
                          std::size_t kernel_size, std::size_t stride = 1,
                          std::size_t padding = 0);
  static LayerSpec dense(std::size_t in_features, std::size_t out_features);
  static LayerSpec relu();
  static LayerSpec maxpool1d(std::size_t window);
  static LayerSpec flatten();

  void validate() const;
  bool has_params() const {
    return kind == LayerKind::kConv1D || kind == LayerKind::kDense;
  }
  std::vector<Shape> param_shapes() const;
  std::size_t param_count() const;
  // Throws ShapeError when `in` is not an acceptable input.
  Shape output_shape(const Shape& in) const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

std::string describe(const LayerSpec& spec);

// A layer with parameters, their gradients, and the forward cache needed by
// backward. The cache is valid only between a forward and its backward.
template <typename T>
class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(spec) {
    spec_.validate();
    for (const Shape& s : spec_.param_shapes()) {
      params_.emplace_back(s);
      grads_.emplace_back(s);
    }
  }

  const LayerSpec& spec() const { return spec_; }
  std::vector<BasicTensor<T>>& params() { return params_; }
  const std::vector<BasicTensor<T>>& params() const { return params_; }
  std::vector<BasicTensor<T>>& grads() { return grads_; }
  const std::vector<BasicTensor<T>>& grads() const { return grads_; }

  bool has_cache() const { return cached_; }
  void clear_cache() {
    cached_ = false;
    input_ = {};
    argmax_.clear();
  }

  BasicTensor<T> forward(const BasicTensor<T>& input);
  // Returns the gradient w.r.t. the cached input and overwrites grads().
  BasicTensor<T> backward(const BasicTensor<T>& grad_out);

  template <typename U>
  Layer<U> cast() const {
    Layer<U> out(spec_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out.params()[i] = params_[i].template cast<U>();
    }
    return out;
  }

 private:
  BasicTensor<T> conv_forward(const BasicTensor<T>& x) const;
  BasicTensor<T> conv_backward(const BasicTensor<T>& g);
  BasicTensor<T> dense_forward(const BasicTensor<T>& x) const;
  BasicTensor<T> dense_backward(const BasicTensor<T>& g);
  BasicTensor<T> pool_forward(const BasicTensor<T>& x);
  BasicTensor<T> pool_backward(const BasicTensor<T>& g) const;

  LayerSpec spec_;
  std::vector<BasicTensor<T>> params_;
  std::vector<BasicTensor<T>> grads_;
  BasicTensor<T> input_;
  Shape output_shape_;
  std::vector<std::uint32_t> argmax_;
  bool cached_ = false;
};

namespace detail {

inline Shape batched(std::size_t batch, const Shape& sample) {
  Shape s;
  s.reserve(sample.size() + 1);
  s.push_back(batch);
  s.insert(s.end(), sample.begin(), sample.end());
  return s;
}

inline Shape sample_shape(const Shape& batched_shape) {
  return Shape(batched_shape.begin() + 1, batched_shape.end());
}

}  // namespace detail

template <typename T>
BasicTensor<T> Layer<T>::forward(const BasicTensor<T>& input) {
  if (input.rank() < 2) {
    throw ShapeError(describe(spec_) + ": expected a batched input, got " +
                     shape_str(input.shape()));
  }
  const Shape out_sample = spec_.output_shape(detail::sample_shape(input.shape()));
  BasicTensor<T> out;
  switch (spec_.kind) {
    case LayerKind::kConv1D:
      out = conv_forward(input);
      break;
    case LayerKind::kDense:
      out = dense_forward(input);
      break;
    case LayerKind::kReLU: {
      out = input;
      for (T& v : out.data()) v = v > T{0} ? v : T{0};
      break;
    }
    case LayerKind::kMaxPool1D:
      out = pool_forward(input);
      break;
    case LayerKind::kFlatten:
      out = input.reshaped(detail::batched(input.dim(0), out_sample));
      break;
  }
  input_ = input;
  output_shape_ = out.shape();
  cached_ = true;
  return out;
}

template <typename T>
BasicTensor<T> Layer<T>::backward(const BasicTensor<T>& grad_out) {
  if (!cached_) {
    throw ShapeError(describe(spec_) + ": backward called without a forward cache");
  }
  if (grad_out.shape() != output_shape_) {
    throw ShapeError(describe(spec_) + ": grad_out shape " +
                     shape_str(grad_out.shape()) + " does not match forward output " +
                     shape_str(output_shape_));
  }
  BasicTensor<T> grad_in;
  switch (spec_.kind) {
    case LayerKind::kConv1D:
      grad_in = conv_backward(grad_out);
      break;
    case LayerKind::kDense:
      grad_in = dense_backward(grad_out);
      break;
    case LayerKind::kReLU: {
      grad_in = grad_out;
      for (std::size_t i = 0; i < grad_in.numel(); ++i) {
        if (!(input_[i] > T{0})) grad_in[i] = T{0};
      }
      break;
    }
    case LayerKind::kMaxPool1D:
      grad_in = pool_backward(grad_out);
      break;
    case LayerKind::kFlatten:
      grad_in = grad_out.reshaped(input_.shape());
      break;
  }
  clear_cache();
  return grad_in;
}

template <typename T>
BasicTensor<T> Layer<T>::conv_forward(const BasicTensor<T>& x) const {
  const std::size_t batch = x.dim(0), cin = spec_.in_channels,
                    cout = spec_.out_channels, len = x.dim(2),
                    k = spec_.kernel_size, stride = spec_.stride,
                    pad = spec_.padding;
  const std::size_t out_len = (len + 2 * pad - k) / stride + 1;
  BasicTensor<T> y({batch, cout, out_len});
  const T* w = params_[0].raw();
  const T* bias = params_[1].raw();
  const T* xin = x.raw();
  T* yout = y.raw();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < cout; ++o) {
      T* yrow = yout + (b * cout + o) * out_len;
      for (std::size_t t = 0; t < out_len; ++t) {
        T acc = bias[o];
        const std::ptrdiff_t start =
            static_cast<std::ptrdiff_t>(t * stride) - static_cast<std::ptrdiff_t>(pad);
        for (std::size_t c = 0; c < cin; ++c) {
          const T* xrow = xin + (b * cin + c) * len;
          const T* wrow = w + (o * cin + c) * k;
          for (std::size_t j = 0; j < k; ++j) {
            const std::ptrdiff_t pos = start + static_cast<std::ptrdiff_t>(j);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
            acc += wrow[j] * xrow[pos];
          }
        }
        yrow[t] = acc;
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> Layer<T>::conv_backward(const BasicTensor<T>& g) {
  const BasicTensor<T>& x = input_;
  const std::size_t batch = x.dim(0), cin = spec_.in_channels,
                    cout = spec_.out_channels, len = x.dim(2),
                    k = spec_.kernel_size, stride = spec_.stride,
                    pad = spec_.padding, out_len = g.dim(2);
  BasicTensor<T> gx(x.shape());
  BasicTensor<T>& gw = grads_[0];
  BasicTensor<T>& gb = grads_[1];
  gw.fill(T{0});
  gb.fill(T{0});
  const T* w = params_[0].raw();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < cout; ++o) {
      const T* grow = g.raw() + (b * cout + o) * out_len;
      for (std::size_t t = 0; t < out_len; ++t) {
        const T go = grow[t];
        gb[o] += go;
        const std::ptrdiff_t start =
            static_cast<std::ptrdiff_t>(t * stride) - static_cast<std::ptrdiff_t>(pad);
        for (std::size_t c = 0; c < cin; ++c) {
          const T* xrow = x.raw() + (b * cin + c) * len;
          T* gxrow = gx.raw() + (b * cin + c) * len;
          const T* wrow = w + (o * cin + c) * k;
          T* gwrow = gw.raw() + (o * cin + c) * k;
          for (std::size_t j = 0; j < k; ++j) {
            const std::ptrdiff_t pos = start + static_cast<std::ptrdiff_t>(j);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
            gwrow[j] += go * xrow[pos];
            gxrow[pos] += go * wrow[j];
          }
        }
      }
    }
  }
  return gx;
}

template <typename T>
BasicTensor<T> Layer<T>::dense_forward(const BasicTensor<T>& x) const {
  const std::size_t batch = x.dim(0), in = spec_.in_features,
                    out = spec_.out_features;
  BasicTensor<T> y({batch, out});
  const T* w = params_[0].raw();
  const T* bias = params_[1].raw();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* xrow = x.raw() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      T acc = bias[o];
      const T* wrow = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += wrow[i] * xrow[i];
      y[b * out + o] = acc;
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> Layer<T>::dense_backward(const BasicTensor<T>& g) {
  const BasicTensor<T>& x = input_;
  const std::size_t batch = x.dim(0), in = spec_.in_features,
                    out = spec_.out_features;
  BasicTensor<T> gx(x.shape());
  BasicTensor<T>& gw = grads_[0];
  BasicTensor<T>& gb = grads_[1];
  gw.fill(T{0});
  gb.fill(T{0});
  const T* w = params_[0].raw();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* xrow = x.raw() + b * in;
    T* gxrow = gx.raw() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      const T go = g[b * out + o];
      gb[o] += go;
      const T* wrow = w + o * in;
      T* gwrow = gw.raw() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gwrow[i] += go * xrow[i];
        gxrow[i] += go * wrow[i];
      }
    }
  }
  return gx;
}

template <typename T>
BasicTensor<T> Layer<T>::pool_forward(const BasicTensor<T>& x) {
  const std::size_t batch = x.dim(0), ch = x.dim(1), len = x.dim(2),
                    win = spec_.window, out_len = len / win;
  BasicTensor<T> y({batch, ch, out_len});
  argmax_.assign(y.numel(), 0);
  for (std::size_t r = 0; r < batch * ch; ++r) {
    const T* xrow = x.raw() + r * len;
    for (std::size_t t = 0; t < out_len; ++t) {
      std::size_t best = t * win;
      for (std::size_t j = 1; j < win; ++j) {
        if (xrow[t * win + j] > xrow[best]) best = t * win + j;
      }
      y[r * out_len + t] = xrow[best];
      argmax_[r * out_len + t] = static_cast<std::uint32_t>(best);
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> Layer<T>::pool_backward(const BasicTensor<T>& g) const {
  const std::size_t len = input_.dim(2), out_len = g.dim(2),
                    rows = input_.dim(0) * input_.dim(1);
  BasicTensor<T> gx(input_.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < out_len; ++t) {
      gx[r * len + argmax_[r * out_len + t]] += g[r * out_len + t];
    }
  }
  return gx;
}

}  // namespace fedsplit

#endif  // FEDSPLIT_LAYERS_H_
