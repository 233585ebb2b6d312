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

#ifndef FEDSPLIT_OPTIMIZER_H_
#define FEDSPLIT_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedsplit/model.h"
#include "fedsplit/tensor.h"

namespace fedsplit {

enum class OptimizerKind { kAdam, kSgd };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  float lr = 0.001f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
};

// Per-parameter moment buffers plus the completed-step counter. Moments are
// only allocated for Adam.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, const std::vector<Shape>& param_shapes);
  static Optimizer for_model(const OptimizerConfig& config, const Model& model) {
    return Optimizer(config, model.param_shapes());
  }

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t steps() const { return steps_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

  void step(std::span<Tensor* const> params, std::span<const Tensor* const> grads);
  void step(Model& model);

 private:
  OptimizerConfig config_;
  std::vector<Shape> shapes_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::uint64_t steps_ = 0;
};

}  // namespace fedsplit

#endif  // FEDSPLIT_OPTIMIZER_H_
