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

#include "fedsplit/layers.h"

#include "fedsplit/model.h"

namespace fedsplit {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv1D: return "Conv1D";
    case LayerKind::kDense: return "Dense";
    case LayerKind::kReLU: return "ReLU";
    case LayerKind::kMaxPool1D: return "MaxPool1D";
    case LayerKind::kFlatten: return "Flatten";
  }
  return "?";
}

LayerSpec LayerSpec::conv1d(std::size_t in_channels, std::size_t out_channels,
                            std::size_t kernel_size, std::size_t stride,
                            std::size_t padding) {
  LayerSpec s;
  s.kind = LayerKind::kConv1D;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.kernel_size = kernel_size;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t in_features, std::size_t out_features) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.in_features = in_features;
  s.out_features = out_features;
  return s;
}

LayerSpec LayerSpec::relu() { return LayerSpec{}; }

LayerSpec LayerSpec::maxpool1d(std::size_t window) {
  LayerSpec s;
  s.kind = LayerKind::kMaxPool1D;
  s.window = window;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  return s;
}

std::string describe(const LayerSpec& s) {
  switch (s.kind) {
    case LayerKind::kConv1D:
      return "Conv1D(in=" + std::to_string(s.in_channels) +
             ", out=" + std::to_string(s.out_channels) +
             ", k=" + std::to_string(s.kernel_size) +
             ", stride=" + std::to_string(s.stride) +
             ", pad=" + std::to_string(s.padding) + ")";
    case LayerKind::kDense:
      return "Dense(" + std::to_string(s.in_features) + "->" +
             std::to_string(s.out_features) + ")";
    case LayerKind::kMaxPool1D:
      return "MaxPool1D(" + std::to_string(s.window) + ")";
    default:
      return to_string(s.kind);
  }
}

void LayerSpec::validate() const {
  auto need = [&](std::size_t v, const char* field) {
    if (v < 1) {
      throw ShapeError(to_string(kind) + ": " + field + " must be >= 1");
    }
  };
  switch (kind) {
    case LayerKind::kConv1D:
      need(in_channels, "in_channels");
      need(out_channels, "out_channels");
      need(kernel_size, "kernel_size");
      need(stride, "stride");
      break;
    case LayerKind::kDense:
      need(in_features, "in_features");
      need(out_features, "out_features");
      break;
    case LayerKind::kMaxPool1D:
      need(window, "window");
      break;
    default:
      break;
  }
}

std::vector<Shape> LayerSpec::param_shapes() const {
  switch (kind) {
    case LayerKind::kConv1D:
      return {{out_channels, in_channels, kernel_size}, {out_channels}};
    case LayerKind::kDense:
      return {{out_features, in_features}, {out_features}};
    default:
      return {};
  }
}

std::size_t LayerSpec::param_count() const {
  std::size_t n = 0;
  for (const Shape& s : param_shapes()) n += shape_numel(s);
  return n;
}

Shape LayerSpec::output_shape(const Shape& in) const {
  auto fail = [&](const std::string& expected) -> ShapeError {
    return ShapeError(describe(*this) + ": expected input " + expected + ", got " +
                      shape_str(in));
  };
  switch (kind) {
    case LayerKind::kConv1D: {
      if (in.size() != 2 || in[0] != in_channels) {
        throw fail("[" + std::to_string(in_channels) + ", length]");
      }
      const std::size_t padded = in[1] + 2 * padding;
      if (padded < kernel_size) {
        throw fail("length >= " + std::to_string(kernel_size - 2 * padding));
      }
      return {out_channels, (padded - kernel_size) / stride + 1};
    }
    case LayerKind::kDense:
      if (in.size() != 1 || in[0] != in_features) {
        throw fail("[" + std::to_string(in_features) + "]");
      }
      return {out_features};
    case LayerKind::kReLU:
      if (in.empty()) throw fail("a non-empty shape");
      return in;
    case LayerKind::kMaxPool1D:
      if (in.size() != 2 || in[1] < window) {
        throw fail("[channels, length >= " + std::to_string(window) + "]");
      }
      return {in[0], in[1] / window};
    case LayerKind::kFlatten:
      if (in.empty()) throw fail("a non-empty shape");
      return {shape_numel(in)};
  }
  throw fail("a known layer kind");
}

std::vector<Shape> shape_chain(const Shape& input_shape,
                               const std::vector<LayerSpec>& layers) {
  std::vector<Shape> shapes{input_shape};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    try {
      layers[i].validate();
      shapes.push_back(layers[i].output_shape(shapes.back()));
    } catch (const ShapeError& e) {
      throw ShapeError("layer " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return shapes;
}

}  // namespace fedsplit
