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

#include "fedsplit/split_engine.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <thread>

#include "fedsplit/loss.h"

namespace fedsplit {

void SplitConfig::validate() const {
  if (clients < 1) throw std::invalid_argument("clients must be >= 1");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  model.validate();
  if (cut_index < 1 || cut_index >= model.layers.size()) {
    throw std::invalid_argument("cut_index " + std::to_string(cut_index) + " outside [1, " +
                                std::to_string(model.layers.size()) + ")");
  }
  if (!order.empty()) {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != i || sorted.size() != clients) {
        throw std::invalid_argument("visit order must be a permutation of the client ids");
      }
    }
  }
}

std::vector<std::size_t> SplitConfig::visit_order() const {
  if (!order.empty()) return order;
  std::vector<std::size_t> out(clients);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

std::vector<SplitStep> SplitConfig::schedule() const {
  return split_schedule(rounds, visit_order(), sync_mode);
}

void split_client_epoch(Model& client_part, Optimizer& opt, const Dataset& shard,
                        std::span<const std::size_t> order, std::size_t batch_size,
                        Endpoint& endpoint) {
  if (shard.size() == 0) throw DataError("split client epoch on an empty shard");
  for (std::size_t off = 0; off < order.size(); off += batch_size) {
    const std::size_t b = std::min(batch_size, order.size() - off);
    const std::span<const std::size_t> idx(order.data() + off, b);
    const Tensor smashed = client_part.forward(shard.gather(idx));
    Bytes payload;
    payload.reserve(encoded_tensor_size(smashed.shape()) + encoded_labels_size(b));
    append_tensor(payload, smashed);
    append_labels(payload, shard.gather_labels(idx));
    endpoint.send(FrameType::kActivations, std::move(payload));

    const Tensor grad = decode_tensor(endpoint.recv_expect(FrameType::kGradients).payload);
    if (grad.shape() != smashed.shape()) {
      throw ProtocolError("GRADIENTS shape " + shape_str(grad.shape()) +
                          " does not match activations " + shape_str(smashed.shape()));
    }
    client_part.backward(grad);
    opt.step(client_part);
  }
}

float split_server_session(Model& server_part, Optimizer& opt, const Shape& smashed_shape,
                           std::size_t batches, Endpoint& endpoint, std::uint32_t delay_us) {
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < batches; ++i) {
    const Frame f = endpoint.recv_expect(FrameType::kActivations);
    ByteReader reader(f.payload);
    Tensor smashed = reader.tensor();
    const std::vector<Label> labels = reader.labels();
    reader.finish();
    Shape want{smashed.dim(0)};
    want.insert(want.end(), smashed_shape.begin(), smashed_shape.end());
    if (smashed.shape() != want || labels.size() != smashed.dim(0)) {
      throw ProtocolError("ACTIVATIONS " + shape_str(smashed.shape()) + " with " +
                          std::to_string(labels.size()) + " labels, expected per-sample " +
                          shape_str(smashed_shape));
    }
    const Tensor logits = server_part.forward(smashed);
    const LossResult<float> loss = softmax_cross_entropy(logits, labels);
    const Tensor grad = server_part.backward(loss.grad);
    if (delay_us > 0) std::this_thread::sleep_for(std::chrono::microseconds(delay_us));
    endpoint.send(FrameType::kGradients, encode_tensor(grad));
    opt.step(server_part);
    loss_sum += loss.loss;
  }
  return batches > 0 ? static_cast<float>(loss_sum / batches) : 0.0f;
}

namespace {

Model initial_client_part(const SplitConfig& config) {
  return split_model(initial_model(config.model, config.seed, config.model_id), config.cut_index)
      .client;
}

}  // namespace

SplitClient::SplitClient(const SplitConfig& config, std::size_t client_id, const Dataset& shard)
    : config_(config),
      id_(client_id),
      shard_(shard),
      part_(initial_client_part(config)),
      opt_(Optimizer::for_model(config.optimizer, part_)) {
  config_.validate();
}

void SplitClient::run_step(const SplitStep& step, Endpoint& endpoint) {
  if (step.client != id_) {
    throw std::invalid_argument("step for client " + std::to_string(step.client) +
                                " run on client " + std::to_string(id_));
  }
  if (step.handoff_in) {
    if (config_.sync_mode == SyncMode::kRelay) {
      part_.set_flat_params(
          decode_params(endpoint.recv_expect(FrameType::kClientWeights).payload));
    } else {
      endpoint.recv_expect(FrameType::kTokenPass);
    }
  }
  const auto order =
      epoch_order(config_.seed, config_.model_id, id_, step.round, 0, shard_.size());
  split_client_epoch(part_, opt_, shard_, order, config_.batch_size, endpoint);
  if (step.eval_upload) endpoint.send(FrameType::kMetrics, encode_params(part_.flat_params()));
  if (step.handoff_out) {
    if (config_.sync_mode == SyncMode::kRelay) {
      endpoint.send(FrameType::kClientWeights, encode_params(part_.flat_params()));
    } else {
      endpoint.send(FrameType::kTokenPass);
    }
  }
}

SplitCoordinator::SplitCoordinator(const SplitConfig& config,
                                   std::span<const std::size_t> shard_sizes)
    : config_(config),
      shard_sizes_(shard_sizes.begin(), shard_sizes.end()),
      smashed_(smashed_shape(config.model, config.cut_index)),
      server_(split_model(initial_model(config.model, config.seed, config.model_id),
                          config.cut_index)
                  .server),
      opt_(Optimizer::for_model(config.optimizer, server_)),
      client_part_(initial_client_part(config)),
      holder_(config.visit_order().front()) {
  config_.validate();
  if (shard_sizes_.size() != config_.clients) {
    throw std::invalid_argument("need one shard size per client");
  }
}

void SplitCoordinator::run_step(const SplitStep& step, Endpoint& endpoint) {
  const std::size_t c = step.client;
  if (step.handoff_in) {
    if (holder_ == c) {
      throw EngineError("handoff to client " + std::to_string(c) + ", which already holds the token",
                        step.round, c);
    }
    if (config_.sync_mode == SyncMode::kRelay) {
      endpoint.send(FrameType::kClientWeights, encode_params(client_part_.flat_params()));
    } else {
      endpoint.send(FrameType::kTokenPass);
    }
    holder_ = c;
  } else if (holder_ != c) {
    throw EngineError("client " + std::to_string(c) + " is not the active client", step.round, c);
  }
  split_server_session(server_, opt_, smashed_, batch_count(shard_sizes_.at(c), config_.batch_size),
                       endpoint, config_.server_delay_us);
  if (step.eval_upload) {
    client_part_.set_flat_params(decode_params(endpoint.recv_expect(FrameType::kMetrics).payload));
  }
  if (step.handoff_out) {
    if (config_.sync_mode == SyncMode::kRelay) {
      client_part_.set_flat_params(
          decode_params(endpoint.recv_expect(FrameType::kClientWeights).payload));
    } else {
      endpoint.recv_expect(FrameType::kTokenPass);
    }
  }
}

TrainResult run_split(const SplitConfig& config, const Dataset& test,
                      std::span<Endpoint* const> endpoints,
                      std::span<const std::size_t> shard_sizes, const RoundHook& hook) {
  config.validate();
  if (endpoints.size() != config.clients) {
    throw std::invalid_argument("run_split: need one endpoint per client");
  }
  SplitCoordinator coord(config, shard_sizes);
  MetricsCollector collector(config.clients, config.wall_clock);
  const auto steps = config.schedule();
  std::size_t next = 0;
  for (std::size_t r = 0; r < config.rounds; ++r) {
    collector.begin_round();
    const auto before = snapshot(endpoints);
    for (; next < steps.size() && steps[next].round == r; ++next) {
      const SplitStep& s = steps[next];
      try {
        coord.run_step(s, *endpoints[s.client]);
      } catch (const EngineError&) {
        throw;
      } catch (const std::exception& e) {
        throw EngineError("split round " + std::to_string(r) + ", client " +
                              std::to_string(s.client) + ": " + e.what(),
                          r, s.client);
      }
    }
    const Model full = coord.full_model();
    collector.end_round(evaluate_accuracy(full, test), deltas(snapshot(endpoints), before));
    if (hook) hook(r, full);
  }
  for (Endpoint* e : endpoints) e->send(FrameType::kBye);
  return {coord.full_model(), collector.series()};
}

void run_split_client(const SplitConfig& config, std::size_t client_id, const Dataset& shard,
                      Endpoint& endpoint) {
  SplitClient client(config, client_id, shard);
  for (const SplitStep& s : config.schedule()) {
    if (s.client == client_id) client.run_step(s, endpoint);
  }
  endpoint.recv_expect(FrameType::kBye);
}

}  // namespace fedsplit
