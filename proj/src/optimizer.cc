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

#include "fedsplit/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace fedsplit {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

Optimizer::Optimizer(OptimizerConfig config, const std::vector<Shape>& param_shapes)
    : config_(config), shapes_(param_shapes) {
  if (!(config_.lr >= 0.0f)) throw std::invalid_argument("learning rate must be >= 0");
  if (config_.kind == OptimizerKind::kAdam) {
    for (const Shape& s : shapes_) {
      m_.emplace_back(s);
      v_.emplace_back(s);
    }
  }
}

void Optimizer::step(std::span<Tensor* const> params,
                     std::span<const Tensor* const> grads) {
  if (params.size() != shapes_.size() || grads.size() != shapes_.size()) {
    throw ShapeError("optimizer built for " + std::to_string(shapes_.size()) +
                     " tensors, got " + std::to_string(params.size()) +
                     " params and " + std::to_string(grads.size()) + " grads");
  }
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (params[i]->shape() != shapes_[i] || grads[i]->shape() != shapes_[i]) {
      throw ShapeError("optimizer tensor " + std::to_string(i) + ": expected " +
                       shape_str(shapes_[i]) + ", got param " +
                       shape_str(params[i]->shape()) + " grad " +
                       shape_str(grads[i]->shape()));
    }
  }
  ++steps_;
  const float lr = config_.lr;
  if (config_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
      float* p = params[i]->raw();
      const float* g = grads[i]->raw();
      for (std::size_t j = 0; j < params[i]->numel(); ++j) p[j] -= lr * g[j];
    }
    return;
  }
  const float b1 = config_.beta1, b2 = config_.beta2, eps = config_.epsilon;
  const float c1 = 1.0f - static_cast<float>(std::pow(b1, static_cast<double>(steps_)));
  const float c2 = 1.0f - static_cast<float>(std::pow(b2, static_cast<double>(steps_)));
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    float* p = params[i]->raw();
    const float* g = grads[i]->raw();
    float* m = m_[i].raw();
    float* v = v_[i].raw();
    for (std::size_t j = 0; j < params[i]->numel(); ++j) {
      m[j] = b1 * m[j] + (1.0f - b1) * g[j];
      v[j] = b2 * v[j] + (1.0f - b2) * g[j] * g[j];
      const float mhat = m[j] / c1;
      const float vhat = v[j] / c2;
      p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

void Optimizer::step(Model& model) {
  std::vector<Tensor*> params = model.param_refs();
  std::vector<const Tensor*> grads = model.grad_refs();
  step(params, grads);
}

}  // namespace fedsplit
