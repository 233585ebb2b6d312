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

#include "fedsplit/estimator.h"

#include <numeric>
#include <stdexcept>

#include "fedsplit/transport.h"
#include "json.hpp"

namespace fedsplit {

namespace {

constexpr std::uint64_t kHeader = kFrameHeaderBytes;

// Header words of a tensor codec.
std::uint64_t dims_bytes(std::size_t rank) { return 4 + 4 * rank; }

// HELLO (u32 id) up and BYE down for each client.
void add_control(CommEstimate& e, std::size_t clients) {
  for (std::size_t c = 0; c < clients; ++c) {
    e.control += {4, kHeader};
    e.control += {0, kHeader};
    e.client_up[c] += kHeader + 4;
    e.client_down[c] += kHeader;
  }
}

void resize(CommEstimate& e, std::size_t clients) {
  e.client_up.assign(clients, 0);
  e.client_down.assign(clients, 0);
  e.client_activations.assign(clients, 0);
}

// One parameter vector frame; returns the frame size.
ByteItem params_frame(std::size_t count) { return {4 * count, kHeader + dims_bytes(1)}; }

}  // namespace

std::uint64_t CommEstimate::total() const {
  return model_down.total() + model_up.total() + activations.total() + labels.total() +
         gradients.total() + handoff.total() + evaluation.total() + control.total();
}

std::uint64_t CommEstimate::payload_total() const {
  return model_down.payload + model_up.payload + activations.payload + labels.payload +
         gradients.payload + handoff.payload + evaluation.payload + control.payload;
}

CommEstimate& CommEstimate::operator+=(const CommEstimate& o) {
  model_down += o.model_down;
  model_up += o.model_up;
  activations += o.activations;
  labels += o.labels;
  gradients += o.gradients;
  handoff += o.handoff;
  evaluation += o.evaluation;
  control += o.control;
  auto add = [](std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  };
  add(client_up, o.client_up);
  add(client_down, o.client_down);
  add(client_activations, o.client_activations);
  return *this;
}

std::string CommEstimate::to_json() const {
  using json = nlohmann::json;
  auto item = [](const ByteItem& i) {
    return json{{"payload", i.payload}, {"overhead", i.overhead}, {"total", i.total()}};
  };
  json j;
  j["model_down"] = item(model_down);
  j["model_up"] = item(model_up);
  j["activations"] = item(activations);
  j["labels"] = item(labels);
  j["gradients"] = item(gradients);
  j["handoff"] = item(handoff);
  j["evaluation"] = item(evaluation);
  j["control"] = item(control);
  j["client_up"] = client_up;
  j["client_down"] = client_down;
  j["total"] = total();
  j["payload_total"] = payload_total();
  return j.dump(1);
}

CommEstimate estimate_fl_bytes(std::size_t param_count, std::size_t rounds, std::size_t clients,
                               FlDirection direction) {
  if (param_count < 1 || rounds < 1 || clients < 1) {
    throw std::invalid_argument("estimate_fl_bytes: all arguments must be >= 1");
  }
  CommEstimate e;
  resize(e, clients);
  const ByteItem frame = params_frame(param_count);
  for (std::size_t c = 0; c < clients; ++c) {
    for (std::size_t r = 0; r < rounds; ++r) {
      e.model_up += frame;
      e.client_up[c] += frame.total();
      if (direction == FlDirection::kBoth) {
        e.model_down += frame;
        e.client_down[c] += frame.total();
      }
    }
  }
  add_control(e, clients);
  return e;
}

CommEstimate estimate_split_bytes(const Shape& smashed_shape,
                                  std::span<const std::size_t> shard_sizes,
                                  std::size_t batch_size, std::size_t rounds,
                                  std::size_t client_param_count, SyncMode sync_mode,
                                  const std::vector<std::size_t>& order) {
  const std::size_t k = shard_sizes.size();
  if (smashed_shape.empty() || k < 1 || batch_size < 1 || rounds < 1 || client_param_count < 1) {
    throw std::invalid_argument("estimate_split_bytes: all arguments must be >= 1");
  }
  std::vector<std::size_t> visit = order;
  if (visit.empty()) {
    visit.resize(k);
    std::iota(visit.begin(), visit.end(), std::size_t{0});
  }
  const std::uint64_t per_sample = 4 * shape_numel(smashed_shape);
  const std::uint64_t tensor_dims = dims_bytes(smashed_shape.size() + 1);
  const ByteItem weights = params_frame(client_param_count);
  const ByteItem handoff_leg =
      sync_mode == SyncMode::kRelay ? weights : ByteItem{0, kHeader};

  CommEstimate e;
  resize(e, k);
  for (const SplitStep& s : split_schedule(rounds, visit, sync_mode)) {
    const std::size_t c = s.client;
    if (s.handoff_in) {
      e.handoff += handoff_leg;
      e.client_down[c] += handoff_leg.total();
    }
    for (std::size_t b : batch_sizes(shard_sizes[c], batch_size)) {
      const ByteItem act{per_sample * b, tensor_dims + kHeader};
      const ByteItem lab{4 * b, dims_bytes(1)};
      const ByteItem grad{per_sample * b, tensor_dims + kHeader};
      e.activations += act;
      e.labels += lab;
      e.gradients += grad;
      e.client_activations[c] += act.total();
      e.client_up[c] += act.total() + lab.total();
      e.client_down[c] += grad.total();
    }
    if (s.eval_upload) {
      e.evaluation += weights;
      e.client_up[c] += weights.total();
    }
    if (s.handoff_out) {
      e.handoff += handoff_leg;
      e.client_up[c] += handoff_leg.total();
    }
  }
  add_control(e, k);
  return e;
}

CommEstimate estimate_ensemble_bytes(std::span<const EnsembleMemberShape> members,
                                     std::span<const std::size_t> shard_sizes,
                                     std::size_t batch_size, std::size_t rounds,
                                     SyncMode sync_mode) {
  const std::size_t k = shard_sizes.size();
  ensemble_schedule(members.size(), k);
  CommEstimate e;
  resize(e, k);
  for (std::size_t m = 0; m < members.size(); ++m) {
    CommEstimate solo =
        estimate_split_bytes(members[m].smashed_shape, shard_sizes, batch_size, rounds,
                             members[m].client_param_count, sync_mode, rotated_order(k, m));
    // Control frames are per connection, not per model.
    for (std::size_t c = 0; c < k; ++c) {
      solo.client_up[c] -= kHeader + 4;
      solo.client_down[c] -= kHeader;
    }
    solo.control = {};
    e += solo;
  }
  add_control(e, k);
  return e;
}

}  // namespace fedsplit
