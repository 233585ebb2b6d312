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

#include "fedsplit/fl_engine.h"

#include <algorithm>
#include <exception>
#include <thread>

#include "fedsplit/protocol.h"

namespace fedsplit {

void FlConfig::validate() const {
  if (clients < 1) throw std::invalid_argument("clients must be >= 1");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (local_epochs < 1) throw std::invalid_argument("local_epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  model.validate();
}

float local_train(Model& model, const Dataset& shard, const LocalTrainOptions& options) {
  if (shard.size() == 0) throw DataError("local_train on an empty shard");
  if (options.epochs < 1 || options.batch_size < 1) {
    throw std::invalid_argument("local_train needs epochs >= 1 and batch_size >= 1");
  }
  Optimizer opt = Optimizer::for_model(options.optimizer, model);
  double loss_sum = 0.0;
  std::size_t batches = 0;
  for (std::size_t e = 0; e < options.epochs; ++e) {
    const auto order =
        epoch_order(options.seed, 0, options.client, options.round, e, shard.size());
    for (std::size_t off = 0; off < order.size(); off += options.batch_size) {
      const std::size_t b = std::min(options.batch_size, order.size() - off);
      const std::span<const std::size_t> idx(order.data() + off, b);
      loss_sum += train_batch(model, opt, shard.gather(idx), shard.gather_labels(idx));
      ++batches;
    }
  }
  return static_cast<float>(loss_sum / batches);
}

std::vector<float> fedavg_aggregate(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw std::invalid_argument("fedavg_aggregate needs at least one update");
  std::vector<const ClientUpdate*> sorted;
  for (const ClientUpdate& u : updates) sorted.push_back(&u);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ClientUpdate* a, const ClientUpdate* b) { return a->client < b->client; });
  const std::size_t n = sorted.front()->weights.size();
  double total = 0.0;
  for (const ClientUpdate* u : sorted) {
    if (u->weights.size() != n) {
      throw std::invalid_argument("client " + std::to_string(u->client) + " sent " +
                                  std::to_string(u->weights.size()) + " weights, expected " +
                                  std::to_string(n));
    }
    if (u->samples < 1) {
      throw std::invalid_argument("client " + std::to_string(u->client) + " has no samples");
    }
    total += static_cast<double>(u->samples);
  }
  std::vector<double> acc(n, 0.0);
  for (const ClientUpdate* u : sorted) {
    const double s = static_cast<double>(u->samples);
    for (std::size_t i = 0; i < n; ++i) acc[i] += s * static_cast<double>(u->weights[i]);
  }
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(acc[i] / total);
  return out;
}

TrainResult run_fl(const FlConfig& config, const Dataset& test,
                   std::span<Endpoint* const> endpoints, std::span<const std::size_t> shard_sizes,
                   const RoundHook& hook) {
  config.validate();
  const std::size_t k = config.clients;
  if (endpoints.size() != k || shard_sizes.size() != k) {
    throw std::invalid_argument("run_fl: need one endpoint and one shard size per client");
  }
  Model global = initial_model(config.model, config.seed);
  const std::size_t p = global.param_count();
  MetricsCollector collector(k, config.wall_clock);

  for (std::size_t r = 0; r < config.rounds; ++r) {
    collector.begin_round();
    const auto before = snapshot(endpoints);
    const Bytes down = encode_params(global.flat_params());
    std::vector<std::vector<float>> returned(k);
    std::vector<std::exception_ptr> errors(k);
    {
      std::vector<std::jthread> workers;
      for (std::size_t c = 0; c < k; ++c) {
        workers.emplace_back([&, c] {
          try {
            endpoints[c]->send(FrameType::kModelDown, down);
            returned[c] = decode_params(endpoints[c]->recv_expect(FrameType::kModelUp).payload);
            if (returned[c].size() != p) {
              throw ProtocolError("MODEL_UP carries " + std::to_string(returned[c].size()) +
                                  " parameters, expected " + std::to_string(p));
            }
          } catch (...) {
            errors[c] = std::current_exception();
          }
        });
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (!errors[c]) continue;
      try {
        std::rethrow_exception(errors[c]);
      } catch (const std::exception& e) {
        throw EngineError("fl round " + std::to_string(r) + ", client " + std::to_string(c) +
                              ": " + e.what(),
                          r, c);
      }
    }
    std::vector<ClientUpdate> updates;
    for (std::size_t c = 0; c < k; ++c) updates.push_back({c, returned[c], shard_sizes[c]});
    global.set_flat_params(fedavg_aggregate(updates));
    const auto per_client = deltas(snapshot(endpoints), before);
    collector.end_round(evaluate_accuracy(global, test), per_client);
    if (hook) hook(r, global);
  }
  for (Endpoint* e : endpoints) e->send(FrameType::kBye);
  return {std::move(global), collector.series()};
}

void run_fl_client(const FlConfig& config, std::size_t client_id, const Dataset& shard,
                   Endpoint& endpoint) {
  config.validate();
  Model model = instantiate(config.model);
  for (std::size_t round = 0;; ++round) {
    Frame f = endpoint.recv();
    if (f.type == FrameType::kBye) return;
    if (f.type != FrameType::kModelDown) {
      throw ProtocolError(std::string("fl client expected MODEL_DOWN or BYE, got ") +
                          to_string(f.type));
    }
    model.set_flat_params(decode_params(f.payload));
    local_train(model, shard,
                {config.local_epochs, config.batch_size, config.optimizer, config.seed, client_id,
                 round});
    model.clear_caches();
    endpoint.send(FrameType::kModelUp, encode_params(model.flat_params()));
  }
}

}  // namespace fedsplit
