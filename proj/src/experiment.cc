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

#include "fedsplit/experiment.h"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "fedsplit/ensemble_engine.h"
#include "fedsplit/fl_engine.h"
#include "fedsplit/split_engine.h"

namespace fedsplit {

PreparedData prepare_data(const ExperimentConfig& config) {
  const std::size_t classes = config.model.classes;
  const std::size_t channels = config.model.input_shape[0];
  const std::size_t length = config.model.input_shape[1];
  Dataset all;
  if (config.synthetic) {
    if (channels != 1) throw ConfigError("model.input_channels", "synthetic data has one channel");
    all = synth_sequences(config.synth_samples, classes, length, config.noise_std, config.seed);
  } else {
    all = load_csv(config.data_path, classes);
    if (all.sample_shape() != config.model.input_shape) {
      throw ConfigError("model.input_length", "csv samples have shape " +
                                                  shape_str(all.sample_shape()) +
                                                  ", model expects " +
                                                  shape_str(config.model.input_shape));
    }
  }
  PreparedData out;
  std::tie(out.train, out.test) = train_test_split(all, config.test_fraction, config.seed);
  if (!config.plan_file.empty()) {
    out.plan = PartitionPlan::load(config.plan_file);
    if (out.plan.client_count() != config.clients) {
      throw ConfigError("partition.plan_file",
                        "plan has " + std::to_string(out.plan.client_count()) +
                            " clients, config has " + std::to_string(config.clients));
    }
    out.plan.validate(out.train.size());
  } else {
    switch (config.scheme) {
      case PartitionScheme::kIid:
        out.plan = partition_iid(out.train, config.clients, config.seed);
        break;
      case PartitionScheme::kImbalanced:
        out.plan = partition_imbalanced(out.train, config.clients, config.sigma, config.seed);
        break;
      case PartitionScheme::kNonIid:
        out.plan = partition_noniid(out.train, config.clients, config.classes_per_client,
                                    config.seed);
        break;
    }
  }
  for (const auto& idx : out.plan.clients) out.shards.push_back(out.train.subset(idx));
  out.shard_sizes = out.plan.sizes();
  return out;
}

CommEstimate estimate_experiment(const ExperimentConfig& config,
                                 const std::vector<std::size_t>& shard_sizes) {
  switch (config.mode) {
    case Mode::kFl:
      return estimate_fl_bytes(count_params(config.model_spec()), config.rounds, config.clients,
                               FlDirection::kBoth);
    case Mode::kSplit: {
      const ModelSpec spec = config.model_spec();
      return estimate_split_bytes(smashed_shape(spec, config.cut_index), shard_sizes,
                                  config.batch_size, config.rounds,
                                  client_param_count(spec, config.cut_index), config.sync_mode);
    }
    case Mode::kEnsemble: {
      std::vector<EnsembleMemberShape> members;
      for (const ModelSpec& spec : config.ensemble_specs()) {
        members.push_back(
            {smashed_shape(spec, config.cut_index), client_param_count(spec, config.cut_index)});
      }
      return estimate_ensemble_bytes(members, shard_sizes, config.batch_size, config.rounds,
                                     config.sync_mode);
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

void client_body(const ExperimentConfig& config, std::size_t id, const Dataset& shard,
                 Endpoint& ep) {
  ep.send(FrameType::kHello, encode_u32(static_cast<std::uint32_t>(id)));
  switch (config.mode) {
    case Mode::kFl: run_fl_client(config.fl(), id, shard, ep); break;
    case Mode::kSplit: run_split_client(config.split(), id, shard, ep); break;
    case Mode::kEnsemble: run_ensemble_client(config.ensemble(), id, shard, ep); break;
  }
}

// Reorders accepted endpoints by the client id in their HELLO.
std::vector<EndpointPtr> handshake(std::vector<EndpointPtr> accepted) {
  std::vector<EndpointPtr> ordered(accepted.size());
  for (EndpointPtr& ep : accepted) {
    const std::uint32_t id = decode_u32(ep->recv_expect(FrameType::kHello).payload);
    if (id >= ordered.size() || ordered[id]) {
      throw ProtocolError("HELLO with bad or duplicate client id " + std::to_string(id));
    }
    ordered[id] = std::move(ep);
  }
  return ordered;
}

ExperimentResult coordinate(const ExperimentConfig& config, const PreparedData& data,
                            const std::vector<EndpointPtr>& owned, const ExperimentHook& hook) {
  std::vector<Endpoint*> eps;
  for (const EndpointPtr& e : owned) eps.push_back(e.get());
  ExperimentResult result;
  result.mode = config.mode;
  const auto t0 = std::chrono::steady_clock::now();
  auto single = [&](std::size_t r, const Model& m) {
    if (hook) hook(0, r, m);
  };
  switch (config.mode) {
    case Mode::kFl: {
      TrainResult tr = run_fl(config.fl(), data.test, eps, data.shard_sizes, single);
      result.series.push_back(std::move(tr.rounds));
      result.models.push_back(std::move(tr.model));
      break;
    }
    case Mode::kSplit: {
      TrainResult tr = run_split(config.split(), data.test, eps, data.shard_sizes, single);
      result.series.push_back(std::move(tr.rounds));
      result.models.push_back(std::move(tr.model));
      break;
    }
    case Mode::kEnsemble: {
      EnsembleResult er = run_ensemble(config.ensemble(), data.test, eps, data.shard_sizes, hook);
      for (TrainResult& tr : er.models) {
        result.series.push_back(std::move(tr.rounds));
        result.models.push_back(std::move(tr.model));
      }
      result.ensemble_round_ms = std::move(er.round_ms);
      result.ensemble_session_ms = std::move(er.session_ms);
      break;
    }
  }
  result.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (const Endpoint* e : eps) result.live += e->counters();
  result.estimate = estimate_experiment(config, data.shard_sizes);
  return result;
}

bool is_closed(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ChannelClosed&) {
    return true;
  } catch (...) {
    return false;
  }
}

std::string connect_host(const std::string& address, std::uint16_t port) {
  std::string host = parse_address(address).first;
  if (host == "0.0.0.0") host = "127.0.0.1";
  return host + ":" + std::to_string(port);
}

}  // namespace

ExperimentResult run_local(const ExperimentConfig& config, const ExperimentHook& hook) {
  const PreparedData data = prepare_data(config);
  const std::size_t k = config.clients;

  std::vector<EndpointPtr> coord_side, client_side;
  std::unique_ptr<TcpListener> listener;
  std::uint16_t port = 0;
  if (config.transport == TransportKind::kLoopback) {
    for (std::size_t c = 0; c < k; ++c) {
      auto [a, b] = make_loopback();
      coord_side.push_back(std::move(a));
      client_side.push_back(std::move(b));
    }
  } else {
    listener = std::make_unique<TcpListener>(config.address);
    port = listener->port();
    client_side.resize(k);
  }

  std::mutex mu;
  std::vector<std::exception_ptr> client_errors(k);
  std::vector<std::jthread> clients;
  for (std::size_t c = 0; c < k; ++c) {
    clients.emplace_back([&, c] {
      try {
        if (listener) {
          EndpointPtr ep = tcp_connect(connect_host(config.address, port));
          std::lock_guard<std::mutex> lock(mu);
          client_side[c] = std::move(ep);
        }
        client_body(config, c, data.shards[c], *client_side[c]);
      } catch (...) {
        client_errors[c] = std::current_exception();
        std::lock_guard<std::mutex> lock(mu);
        if (client_side[c]) client_side[c]->close();
        if (listener) listener->close();
      }
    });
  }

  ExperimentResult result;
  std::exception_ptr coord_error;
  try {
    if (listener) {
      for (std::size_t c = 0; c < k; ++c) coord_side.push_back(listener->accept());
    }
    coord_side = handshake(std::move(coord_side));
    result = coordinate(config, data, coord_side, hook);
  } catch (...) {
    coord_error = std::current_exception();
    for (EndpointPtr& e : coord_side) {
      if (e) e->close();
    }
    std::lock_guard<std::mutex> lock(mu);
    for (EndpointPtr& e : client_side) {
      if (e) e->close();
    }
  }
  for (std::jthread& t : clients) t.join();
  for (const std::exception_ptr& e : client_errors) {
    if (e && (!coord_error || !is_closed(e))) std::rethrow_exception(e);
  }
  if (coord_error) std::rethrow_exception(coord_error);
  return result;
}

ExperimentResult run_coordinator(const ExperimentConfig& config, const std::string& listen) {
  const PreparedData data = prepare_data(config);
  TcpListener listener(listen);
  std::vector<EndpointPtr> accepted;
  for (std::size_t c = 0; c < config.clients; ++c) accepted.push_back(listener.accept());
  return coordinate(config, data, handshake(std::move(accepted)), {});
}

void run_client(const ExperimentConfig& config, std::size_t client_id,
                const std::string& connect, std::uint32_t retry_ms) {
  if (client_id >= config.clients) {
    throw ConfigError("client-id", "must be below clients = " + std::to_string(config.clients));
  }
  const PreparedData data = prepare_data(config);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(retry_ms);
  EndpointPtr ep;
  while (!ep) {
    try {
      ep = tcp_connect(connect);
    } catch (const ChannelError&) {
      if (std::chrono::steady_clock::now() >= deadline) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }
  client_body(config, client_id, data.shards[client_id], *ep);
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

std::vector<std::string> write_metrics(const ExperimentConfig& config,
                                       const ExperimentResult& result) {
  std::vector<std::string> paths;
  if (config.output.empty()) return paths;
  for (std::size_t m = 0; m < result.series.size(); ++m) {
    const std::string stem =
        config.output + (config.mode == Mode::kEnsemble ? ".m" + std::to_string(m) : "");
    export_metrics(result.series[m], stem + ".csv", MetricsFormat::kCsv);
    export_metrics(result.series[m], stem + ".json", MetricsFormat::kJson);
    paths.push_back(stem + ".csv");
    paths.push_back(stem + ".json");
  }
  return paths;
}

std::vector<std::string> write_partition(const ExperimentConfig& config,
                                         const PreparedData& data) {
  const std::string stem = config.output.empty() ? "partition" : config.output;
  write_file(stem + ".plan.json", data.plan.to_json() + "\n");
  write_file(stem + ".stats.json", partition_stats(data.plan, data.train).to_json() + "\n");
  return {stem + ".plan.json", stem + ".stats.json"};
}

std::string summary_line(const ExperimentResult& result) {
  std::string acc;
  for (const auto& s : result.series) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.4f", acc.empty() ? "" : ",",
                  s.empty() ? 0.0 : s.back().accuracy);
    acc += buf;
  }
  char line[256];
  std::snprintf(line, sizeof(line), "mode=%s final_accuracy=%s total_bytes=%llu wall_ms=%.1f",
                to_string(result.mode).c_str(), acc.c_str(),
                static_cast<unsigned long long>(result.live.tx + result.live.rx), result.wall_ms);
  return line;
}

}  // namespace fedsplit
