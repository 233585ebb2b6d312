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

#include "fedsplit/ensemble_engine.h"

#include <chrono>
#include <exception>
#include <memory>
#include <thread>

namespace fedsplit {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void EnsembleConfig::validate() const {
  if (models.empty()) throw std::invalid_argument("ensemble needs at least one model");
  ensemble_schedule(models.size(), base.clients);
  for (std::size_t m = 0; m < models.size(); ++m) member(m).validate();
}

SplitConfig EnsembleConfig::member(std::size_t m) const {
  SplitConfig c = base;
  c.model = models.at(m);
  c.model_id = m;
  c.order = rotated_order(base.clients, m);
  return c;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, const Dataset& test,
                            std::span<Endpoint* const> endpoints,
                            std::span<const std::size_t> shard_sizes, const EnsembleHook& hook) {
  config.validate();
  const std::size_t k = config.base.clients, n_models = config.models.size();
  if (endpoints.size() != k) throw std::invalid_argument("run_ensemble: need one endpoint per client");
  const RotationTable table = ensemble_schedule(n_models, k);

  std::vector<std::unique_ptr<SplitCoordinator>> coords;
  std::vector<std::vector<SplitStep>> steps;
  std::vector<std::unique_ptr<MetricsCollector>> collectors;
  for (std::size_t m = 0; m < n_models; ++m) {
    const SplitConfig mc = config.member(m);
    coords.push_back(std::make_unique<SplitCoordinator>(mc, shard_sizes));
    steps.push_back(mc.schedule());
    collectors.push_back(std::make_unique<MetricsCollector>(k, config.base.wall_clock));
  }

  EnsembleResult result;
  result.models.resize(n_models);
  for (std::size_t r = 0; r < config.base.rounds; ++r) {
    const auto round_start = std::chrono::steady_clock::now();
    std::vector<std::vector<ByteCounts>> bytes(n_models, std::vector<ByteCounts>(k));
    std::vector<double> model_ms(n_models, 0.0);
    std::vector<double> sessions;
    for (std::size_t p = 0; p < k; ++p) {
      std::vector<std::exception_ptr> errors(n_models);
      std::vector<double> phase_ms(n_models, 0.0);
      {
        std::vector<std::jthread> workers;
        for (std::size_t m = 0; m < n_models; ++m) {
          workers.emplace_back([&, m] {
            const std::size_t c = table[p][m];
            Endpoint& ep = *endpoints[c];
            const ByteCounts before = ep.counters();
            const auto t0 = std::chrono::steady_clock::now();
            try {
              coords[m]->run_step(steps[m][r * k + p], ep);
            } catch (...) {
              errors[m] = std::current_exception();
            }
            phase_ms[m] = ms_since(t0);
            bytes[m][c] += ep.counters() - before;
          });
        }
      }
      for (std::size_t m = 0; m < n_models; ++m) {
        if (!errors[m]) continue;
        try {
          std::rethrow_exception(errors[m]);
        } catch (const std::exception& e) {
          throw EngineError("ensemble round " + std::to_string(r) + ", phase " +
                                std::to_string(p) + ", model " + std::to_string(m) + ": " +
                                e.what(),
                            r, table[p][m]);
        }
      }
      for (std::size_t m = 0; m < n_models; ++m) {
        model_ms[m] += phase_ms[m];
        sessions.push_back(phase_ms[m]);
      }
    }
    result.round_ms.push_back(ms_since(round_start));
    result.session_ms.push_back(std::move(sessions));
    for (std::size_t m = 0; m < n_models; ++m) {
      const Model full = coords[m]->full_model();
      collectors[m]->end_round(evaluate_accuracy(full, test), bytes[m], model_ms[m]);
      if (hook) hook(m, r, full);
    }
  }
  for (Endpoint* e : endpoints) e->send(FrameType::kBye);
  for (std::size_t m = 0; m < n_models; ++m) {
    result.models[m] = {coords[m]->full_model(), collectors[m]->series()};
  }
  return result;
}

void run_ensemble_client(const EnsembleConfig& config, std::size_t client_id,
                         const Dataset& shard, Endpoint& endpoint) {
  config.validate();
  const std::size_t k = config.base.clients, n_models = config.models.size();
  const RotationTable table = ensemble_schedule(n_models, k);
  std::vector<std::unique_ptr<SplitClient>> members;
  std::vector<std::vector<SplitStep>> steps;
  for (std::size_t m = 0; m < n_models; ++m) {
    const SplitConfig mc = config.member(m);
    members.push_back(std::make_unique<SplitClient>(mc, client_id, shard));
    steps.push_back(mc.schedule());
  }
  for (std::size_t r = 0; r < config.base.rounds; ++r) {
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t m = 0; m < n_models; ++m) {
        if (table[p][m] == client_id) members[m]->run_step(steps[m][r * k + p], endpoint);
      }
    }
  }
  endpoint.recv_expect(FrameType::kBye);
}

}  // namespace fedsplit
