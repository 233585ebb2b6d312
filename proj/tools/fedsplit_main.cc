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

// fedsplit run|partition|estimate --config FILE [--role ...]
//
// Exit codes: 0 success, 1 config or usage error, 2 runtime or protocol
// error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fedsplit/experiment.h"
#include "json.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

std::string estimate_report(const fedsplit::ExperimentConfig& cfg,
                            const fedsplit::PreparedData& data) {
  using fedsplit::FlDirection;
  const fedsplit::ModelSpec spec = cfg.model_spec();
  const std::size_t params = fedsplit::count_params(spec);
  nlohmann::json j;
  j["mode"] = fedsplit::to_string(cfg.mode);
  j["param_count"] = params;
  j["client_param_count"] = fedsplit::client_param_count(spec, cfg.cut_index);
  j["smashed_shape"] = fedsplit::smashed_shape(spec, cfg.cut_index);
  j["shard_sizes"] = data.shard_sizes;
  j["fl_one_direction"] = nlohmann::json::parse(
      fedsplit::estimate_fl_bytes(params, cfg.rounds, cfg.clients, FlDirection::kOne).to_json());
  j["fl"] = nlohmann::json::parse(
      fedsplit::estimate_fl_bytes(params, cfg.rounds, cfg.clients, FlDirection::kBoth).to_json());
  j["split"] = nlohmann::json::parse(
      fedsplit::estimate_split_bytes(fedsplit::smashed_shape(spec, cfg.cut_index),
                                     data.shard_sizes, cfg.batch_size, cfg.rounds,
                                     fedsplit::client_param_count(spec, cfg.cut_index),
                                     cfg.sync_mode)
          .to_json());
  if (cfg.mode == fedsplit::Mode::kEnsemble) {
    j["ensemble"] =
        nlohmann::json::parse(fedsplit::estimate_experiment(cfg, data.shard_sizes).to_json());
  }
  return j.dump(1) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated and split learning experiment runner"};
  app.require_subcommand(1);

  std::string config_path, role = "all", listen, connect;
  std::size_t client_id = 0;
  std::uint32_t retry_ms = 0;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
  };
  CLI::App* run = app.add_subcommand("run", "train per config and write metrics");
  add_config(run);
  run->add_option("--role", role, "all | coordinator | client")
      ->check(CLI::IsMember({"all", "coordinator", "client"}));
  run->add_option("--listen", listen, "coordinator host:port (overrides transport.address)");
  run->add_option("--connect", connect, "client: coordinator host:port");
  run->add_option("--client-id", client_id, "client: id in [0, clients)");
  run->add_option("--retry-ms", retry_ms, "client: keep retrying a refused connect this long");
  CLI::App* part = app.add_subcommand("partition", "write the partition plan and its stats");
  add_config(part);
  CLI::App* est = app.add_subcommand("estimate", "print analytical byte counts");
  add_config(est);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  fedsplit::ExperimentConfig cfg;
  try {
    cfg = fedsplit::load_config(config_path);
    if (*run && role == "client" && connect.empty()) {
      throw fedsplit::ConfigError("--connect", "required with --role client");
    }
  } catch (const fedsplit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*run) {
      if (role == "client") {
        fedsplit::run_client(cfg, client_id, connect, retry_ms);
        std::cout << "client " << client_id << " done\n";
        return kOk;
      }
      fedsplit::ExperimentResult result;
      if (role == "coordinator") {
        result = fedsplit::run_coordinator(cfg, listen.empty() ? cfg.address : listen);
      } else {
        result = fedsplit::run_local(cfg);
      }
      fedsplit::write_metrics(cfg, result);
      std::cout << fedsplit::summary_line(result) << "\n";
    } else if (*part) {
      const fedsplit::PreparedData data = fedsplit::prepare_data(cfg);
      for (const std::string& p : fedsplit::write_partition(cfg, data)) {
        std::cout << "wrote " << p << "\n";
      }
    } else {
      const fedsplit::PreparedData data = fedsplit::prepare_data(cfg);
      const std::string report = estimate_report(cfg, data);
      std::cout << report;
      if (!cfg.output.empty()) {
        std::ofstream f(cfg.output + ".estimate.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + cfg.output + ".estimate.json");
        f << report;
      }
    }
  } catch (const fedsplit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
