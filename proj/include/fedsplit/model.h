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

#ifndef FEDSPLIT_MODEL_H_
#define FEDSPLIT_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fedsplit/layers.h"
#include "fedsplit/tensor.h"

namespace fedsplit {

// Computes per-sample shapes after each layer; element i is the input shape
// of layer i, the last element is the output shape. Throws ShapeError naming
// the first layer whose input does not fit.
std::vector<Shape> shape_chain(const Shape& input_shape,
                               const std::vector<LayerSpec>& layers);

// An ordered stack of layers. Single-owner: forward caches and gradients
// live inside, so an instance must not be used from two threads at once.
template <typename T>
class BasicModel {
 public:
  BasicModel() = default;

  BasicModel(Shape input_shape, const std::vector<LayerSpec>& specs)
      : input_shape_(std::move(input_shape)) {
    shapes_ = shape_chain(input_shape_, specs);
    layers_.reserve(specs.size());
    for (const LayerSpec& s : specs) layers_.emplace_back(s);
  }

  std::size_t layer_count() const { return layers_.size(); }
  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return shapes_.back(); }
  // Per-sample shape entering layer i (i == layer_count() gives the output).
  const Shape& shape_at(std::size_t i) const { return shapes_.at(i); }

  Layer<T>& layer(std::size_t i) { return layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return layers_.at(i); }

  std::vector<LayerSpec> specs() const {
    std::vector<LayerSpec> out;
    for (const auto& l : layers_) out.push_back(l.spec());
    return out;
  }

  BasicTensor<T> forward(const BasicTensor<T>& x) {
    return forward_range(x, 0, layers_.size());
  }

  // Runs layers [from, to). An empty range returns the input unchanged.
  BasicTensor<T> forward_range(const BasicTensor<T>& x, std::size_t from,
                               std::size_t to) {
    check_range(from, to);
    if (x.rank() < 2 || detail::sample_shape(x.shape()) != shapes_[from]) {
      throw ShapeError("layer " + std::to_string(from) + ": expected input [batch, " +
                           shape_str(shapes_[from]) + "], got " + shape_str(x.shape()),
                       from);
    }
    BasicTensor<T> h = x;
    for (std::size_t i = from; i < to; ++i) {
      try {
        h = layers_[i].forward(h);
      } catch (const ShapeError& e) {
        throw ShapeError("layer " + std::to_string(i) + ": " + e.what(), i);
      }
    }
    return h;
  }

  // Backpropagates through layers [down_to, top) in reverse, storing each
  // layer's parameter gradients. Returns d(loss)/d(input of layer down_to).
  BasicTensor<T> backward_range(const BasicTensor<T>& grad, std::size_t top,
                                std::size_t down_to) {
    check_range(down_to, top);
    BasicTensor<T> g = grad;
    for (std::size_t i = top; i > down_to; --i) {
      try {
        g = layers_[i - 1].backward(g);
      } catch (const ShapeError& e) {
        throw ShapeError("layer " + std::to_string(i - 1) + ": " + e.what(), i - 1);
      }
    }
    return g;
  }

  BasicTensor<T> backward(const BasicTensor<T>& grad) {
    return backward_range(grad, layers_.size(), 0);
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_)
      for (const auto& p : l.params()) n += p.numel();
    return n;
  }

  // Flattened in layer order, weight before bias.
  std::vector<T> flat_params() const { return flatten(false); }
  std::vector<T> flat_grads() const { return flatten(true); }

  void set_flat_params(std::span<const T> values) {
    if (values.size() != param_count()) {
      throw ShapeError("parameter vector has " + std::to_string(values.size()) +
                       " elements, model expects " + std::to_string(param_count()));
    }
    std::size_t off = 0;
    for (auto& l : layers_) {
      for (auto& p : l.params()) {
        std::copy(values.begin() + off, values.begin() + off + p.numel(),
                  p.data().begin());
        off += p.numel();
      }
    }
  }

  std::vector<BasicTensor<T>*> param_refs() {
    std::vector<BasicTensor<T>*> out;
    for (auto& l : layers_)
      for (auto& p : l.params()) out.push_back(&p);
    return out;
  }
  std::vector<const BasicTensor<T>*> grad_refs() const {
    std::vector<const BasicTensor<T>*> out;
    for (const auto& l : layers_)
      for (const auto& g : l.grads()) out.push_back(&g);
    return out;
  }
  std::vector<Shape> param_shapes() const {
    std::vector<Shape> out;
    for (const auto& l : layers_)
      for (const auto& p : l.params()) out.push_back(p.shape());
    return out;
  }

  void clear_caches() {
    for (auto& l : layers_) l.clear_cache();
  }

  template <typename U>
  BasicModel<U> cast() const {
    BasicModel<U> out(input_shape_, specs());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      out.layer(i) = layers_[i].template cast<U>();
    }
    return out;
  }

 private:
  void check_range(std::size_t from, std::size_t to) const {
    if (from > to || to > layers_.size()) {
      throw std::out_of_range("layer range [" + std::to_string(from) + ", " +
                              std::to_string(to) + ") outside model of " +
                              std::to_string(layers_.size()) + " layers");
    }
  }

  std::vector<T> flatten(bool grads) const {
    std::vector<T> out;
    out.reserve(param_count());
    for (const auto& l : layers_)
      for (const auto& p : grads ? l.grads() : l.params())
        out.insert(out.end(), p.data().begin(), p.data().end());
    return out;
  }

  Shape input_shape_;
  std::vector<Shape> shapes_;
  std::vector<Layer<T>> layers_;
};

using Model = BasicModel<float>;

}  // namespace fedsplit

#endif  // FEDSPLIT_MODEL_H_
