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

#ifndef FEDSPLIT_MODEL_ZOO_H_
#define FEDSPLIT_MODEL_ZOO_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fedsplit/layers.h"
#include "fedsplit/model.h"

namespace fedsplit {

struct ModelSpec {
  Shape input_shape;  // (channels, length)
  std::vector<LayerSpec> layers;
  std::size_t classes = 0;

  // Validates the layer chain and that the last layer emits [classes].
  void validate() const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Hyperparameters of the 1D-CNN family: conv_depth blocks of
// Conv1D("same" padding) + ReLU, with a MaxPool1D after every pool_every
// blocks (at most max_pools of them), then Flatten, Dense(hidden), ReLU,
// Dense(classes). pool_every = 0 disables pooling.
struct ConvProfile {
  std::size_t conv_depth = 4;
  std::size_t channels = 8;
  std::size_t kernel = 3;
  std::size_t pool_every = 2;
  std::size_t max_pools = 2;
  std::size_t pool_window = 2;
  std::size_t hidden = 32;
  std::size_t classes = 5;
  Shape input_shape{1, 64};
};

inline constexpr std::size_t kMinConvDepth = 4;
inline constexpr std::size_t kMaxConvDepth = 8;

ModelSpec build_conv1d_classifier(const ConvProfile& profile);

std::size_t count_params(const ModelSpec& spec);

// Model with zero parameters.
Model instantiate(const ModelSpec& spec);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias, where
// fan_in is in_channels*kernel (Conv1D) or in_features (Dense).
Model init_weights(const ModelSpec& spec, std::uint64_t seed);

struct SplitModel {
  Model client;         // layers [0, cut)
  Model server;         // layers [cut, end)
  Shape smashed_shape;  // per-sample shape at the cut
};

// Requires 1 <= cut_index < layer count.
SplitModel split_model(const Model& model, std::size_t cut_index);
Model join_models(const Model& client, const Model& server);

// Per-sample shape crossing the wire when cutting spec at cut_index.
Shape smashed_shape(const ModelSpec& spec, std::size_t cut_index);
std::size_t client_param_count(const ModelSpec& spec, std::size_t cut_index);

}  // namespace fedsplit

#endif  // FEDSPLIT_MODEL_ZOO_H_
