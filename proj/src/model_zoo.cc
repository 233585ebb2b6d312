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

#include "fedsplit/model_zoo.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "fedsplit/rng.h"

namespace fedsplit {

void ModelSpec::validate() const {
  if (input_shape.size() != 2) {
    throw ShapeError("model input shape must be (channels, length), got " +
                     shape_str(input_shape));
  }
  const std::vector<Shape> chain = shape_chain(input_shape, layers);
  if (chain.back() != Shape{classes}) {
    throw ShapeError("model output " + shape_str(chain.back()) +
                     " does not match class count " + std::to_string(classes));
  }
}

ModelSpec build_conv1d_classifier(const ConvProfile& p) {
  if (p.conv_depth < kMinConvDepth || p.conv_depth > kMaxConvDepth) {
    throw std::invalid_argument("conv_depth must be in [4, 8], got " +
                                std::to_string(p.conv_depth));
  }
  if (p.kernel % 2 == 0) {
    throw std::invalid_argument("kernel must be odd for same-length padding");
  }
  if (p.input_shape.size() != 2) {
    throw ShapeError("input shape must be (channels, length)");
  }
  ModelSpec spec;
  spec.input_shape = p.input_shape;
  spec.classes = p.classes;
  std::size_t in_ch = p.input_shape[0];
  std::size_t pools = 0;
  for (std::size_t block = 1; block <= p.conv_depth; ++block) {
    spec.layers.push_back(LayerSpec::conv1d(in_ch, p.channels, p.kernel, 1, p.kernel / 2));
    spec.layers.push_back(LayerSpec::relu());
    in_ch = p.channels;
    if (p.pool_every > 0 && block % p.pool_every == 0 && pools < p.max_pools) {
      spec.layers.push_back(LayerSpec::maxpool1d(p.pool_window));
      ++pools;
    }
  }
  spec.layers.push_back(LayerSpec::flatten());
  // Dense input width depends on the conv stack; resolve it from the chain,
  // which also reports the failing layer index for impossible geometry.
  const std::vector<Shape> chain = shape_chain(spec.input_shape, spec.layers);
  spec.layers.push_back(LayerSpec::dense(chain.back()[0], p.hidden));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::dense(p.hidden, p.classes));
  spec.validate();
  return spec;
}

std::size_t count_params(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const LayerSpec& l : spec.layers) n += l.param_count();
  return n;
}

Model instantiate(const ModelSpec& spec) {
  spec.validate();
  return Model(spec.input_shape, spec.layers);
}

Model init_weights(const ModelSpec& spec, std::uint64_t seed) {
  Model model = instantiate(spec);
  Rng rng(derive_seed(seed, SeedStream::kInit));
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    Layer<float>& layer = model.layer(i);
    const LayerSpec& s = layer.spec();
    if (!s.has_params()) continue;
    const std::size_t fan_in = s.kind == LayerKind::kConv1D
                                   ? s.in_channels * s.kernel_size
                                   : s.in_features;
    const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
    std::uniform_real_distribution<float> dist(-bound, bound);
    for (Tensor& p : layer.params()) {
      for (float& v : p.data()) v = dist(rng);
    }
  }
  return model;
}

namespace {

Model slice(const Model& model, std::size_t from, std::size_t to) {
  std::vector<LayerSpec> specs;
  for (std::size_t i = from; i < to; ++i) specs.push_back(model.layer(i).spec());
  Model out(model.shape_at(from), specs);
  for (std::size_t i = from; i < to; ++i) {
    out.layer(i - from).params() = model.layer(i).params();
  }
  return out;
}

void check_cut(std::size_t cut, std::size_t layers) {
  if (cut < 1 || cut >= layers) {
    throw std::out_of_range("cut_index " + std::to_string(cut) +
                            " must be in [1, " + std::to_string(layers) + ")");
  }
}

}  // namespace

SplitModel split_model(const Model& model, std::size_t cut_index) {
  check_cut(cut_index, model.layer_count());
  return SplitModel{slice(model, 0, cut_index),
                    slice(model, cut_index, model.layer_count()),
                    model.shape_at(cut_index)};
}

Model join_models(const Model& client, const Model& server) {
  if (client.output_shape() != server.input_shape()) {
    throw ShapeError("cannot join: client emits " + shape_str(client.output_shape()) +
                     ", server expects " + shape_str(server.input_shape()));
  }
  std::vector<LayerSpec> specs = client.specs();
  const std::vector<LayerSpec> tail = server.specs();
  specs.insert(specs.end(), tail.begin(), tail.end());
  Model out(client.input_shape(), specs);
  for (std::size_t i = 0; i < client.layer_count(); ++i) {
    out.layer(i).params() = client.layer(i).params();
  }
  for (std::size_t i = 0; i < server.layer_count(); ++i) {
    out.layer(client.layer_count() + i).params() = server.layer(i).params();
  }
  return out;
}

Shape smashed_shape(const ModelSpec& spec, std::size_t cut_index) {
  check_cut(cut_index, spec.layers.size());
  return shape_chain(spec.input_shape, spec.layers).at(cut_index);
}

std::size_t client_param_count(const ModelSpec& spec, std::size_t cut_index) {
  check_cut(cut_index, spec.layers.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < cut_index; ++i) n += spec.layers[i].param_count();
  return n;
}

}  // namespace fedsplit
