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

#include "fedsplit/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fedsplit {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kFl: return "fl";
    case Mode::kSplit: return "split";
    case Mode::kEnsemble: return "ensemble";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_uint(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected on/off, got '" + v + "'");
}

template <typename E>
E parse_enum(const std::string& key, const std::string& v,
             const std::vector<std::pair<std::string, E>>& options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += (names.empty() ? "" : "|") + name;
  }
  throw ConfigError(key, "'" + v + "' is not one of " + names);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

template <typename T>
Setter uint_field(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_uint<T>(k, v);
  };
}

Setter profile_field(std::size_t ConvProfile::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.model.*field = parse_uint<std::size_t>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.mode = parse_enum<Mode>(
             k, v, {{"fl", Mode::kFl}, {"split", Mode::kSplit}, {"ensemble", Mode::kEnsemble}});
       }},
      {"clients", uint_field(&ExperimentConfig::clients)},
      {"rounds", uint_field(&ExperimentConfig::rounds)},
      {"local_epochs", uint_field(&ExperimentConfig::local_epochs)},
      {"batch_size", uint_field(&ExperimentConfig::batch_size)},
      {"seed", uint_field(&ExperimentConfig::seed)},
      {"server_delay_us", uint_field(&ExperimentConfig::server_delay_us)},
      {"lr",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.optimizer.lr = static_cast<float>(parse_double(k, v));
       }},
      {"optimizer",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.optimizer.kind =
             parse_enum<OptimizerKind>(k, v, {{"adam", OptimizerKind::kAdam}, {"sgd", OptimizerKind::kSgd}});
       }},
      {"sync_mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sync_mode = parse_enum<SyncMode>(k, v, {{"relay", SyncMode::kRelay}, {"none", SyncMode::kNone}});
       }},
      {"output", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = v; }},
      {"wall_clock",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.wall_clock = parse_bool(k, v);
       }},
      {"test_fraction",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.test_fraction = parse_double(k, v);
       }},
      {"model.conv_depth", profile_field(&ConvProfile::conv_depth)},
      {"model.channels", profile_field(&ConvProfile::channels)},
      {"model.kernel", profile_field(&ConvProfile::kernel)},
      {"model.classes", profile_field(&ConvProfile::classes)},
      {"model.pool_every", profile_field(&ConvProfile::pool_every)},
      {"model.max_pools", profile_field(&ConvProfile::max_pools)},
      {"model.pool_window", profile_field(&ConvProfile::pool_window)},
      {"model.hidden", profile_field(&ConvProfile::hidden)},
      {"model.input_channels",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.model.input_shape[0] = parse_uint<std::size_t>(k, v);
       }},
      {"model.input_length",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.model.input_shape[1] = parse_uint<std::size_t>(k, v);
       }},
      {"model.cut_index", uint_field(&ExperimentConfig::cut_index)},
      {"dataset.source",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic = parse_enum<bool>(k, v, {{"synth", true}, {"csv", false}});
       }},
      {"dataset.path",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.data_path = v; }},
      {"dataset.n", uint_field(&ExperimentConfig::synth_samples)},
      {"dataset.noise_std",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.noise_std = parse_double(k, v);
       }},
      {"partition.scheme",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.scheme = parse_enum<PartitionScheme>(k, v,
                                                {{"iid", PartitionScheme::kIid},
                                                 {"imbalanced", PartitionScheme::kImbalanced},
                                                 {"noniid", PartitionScheme::kNonIid}});
       }},
      {"partition.sigma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sigma = parse_double(k, v);
       }},
      {"partition.classes_per_client", uint_field(&ExperimentConfig::classes_per_client)},
      {"partition.plan_file",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.plan_file = v; }},
      {"transport.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.transport = parse_enum<TransportKind>(
             k, v, {{"loopback", TransportKind::kLoopback}, {"tcp", TransportKind::kTcp}});
       }},
      {"transport.address",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.address = v; }},
      {"ensemble.conv_depths",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ensemble_depths.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           c.ensemble_depths.push_back(parse_uint<std::size_t>(k, trim(item)));
         }
         if (c.ensemble_depths.empty()) throw ConfigError(k, "empty list");
       }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void validate(const ExperimentConfig& c, bool has_clients, bool has_mode) {
  require(has_mode, "mode", "missing required key");
  require(has_clients, "clients", "missing required key");
  require(c.clients >= 1, "clients", "must be >= 1");
  require(c.rounds >= 1, "rounds", "must be >= 1");
  require(c.batch_size >= 1, "batch_size", "must be >= 1");
  require(c.local_epochs >= 1, "local_epochs", "must be >= 1");
  require(c.mode == Mode::kFl || c.local_epochs == 1, "local_epochs",
          "split learning trains exactly one local epoch per client turn");
  require(c.optimizer.lr >= 0, "lr", "must be >= 0");
  require(c.test_fraction > 0 && c.test_fraction < 1, "test_fraction", "must be in (0, 1)");
  require(c.synthetic || !c.data_path.empty(), "dataset.path", "required when source = csv");
  require(c.noise_std >= 0, "dataset.noise_std", "must be >= 0");
  require(c.sigma >= 0, "partition.sigma", "must be >= 0");
  require(c.classes_per_client >= 1 && c.classes_per_client <= c.model.classes,
          "partition.classes_per_client", "must be in [1, classes]");
  if (c.mode == Mode::kEnsemble) {
    require(!c.ensemble_depths.empty(), "ensemble.conv_depths", "required in ensemble mode");
    require(c.ensemble_depths.size() <= c.clients, "ensemble.conv_depths",
            "more models than clients");
  }
  try {
    if (c.mode == Mode::kEnsemble) {
      c.ensemble().validate();
    } else {
      const ModelSpec spec = c.model_spec();
      require(c.cut_index >= 1 && c.cut_index < spec.layers.size(), "model.cut_index",
              "must leave layers on both sides of the cut");
      if (c.mode == Mode::kSplit) c.split().validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("model", e.what());
  }
}

}  // namespace

ModelSpec ExperimentConfig::model_spec() const {
  try {
    return build_conv1d_classifier(model);
  } catch (const std::exception& e) {
    throw ConfigError("model", e.what());
  }
}

std::vector<ModelSpec> ExperimentConfig::ensemble_specs() const {
  std::vector<ModelSpec> out;
  for (std::size_t depth : ensemble_depths) {
    ConvProfile p = model;
    p.conv_depth = depth;
    try {
      out.push_back(build_conv1d_classifier(p));
    } catch (const std::exception& e) {
      throw ConfigError("ensemble.conv_depths", e.what());
    }
  }
  return out;
}

FlConfig ExperimentConfig::fl() const {
  FlConfig c;
  c.clients = clients;
  c.rounds = rounds;
  c.local_epochs = local_epochs;
  c.batch_size = batch_size;
  c.optimizer = optimizer;
  c.seed = seed;
  c.model = model_spec();
  c.wall_clock = wall_clock;
  return c;
}

SplitConfig ExperimentConfig::split() const {
  SplitConfig c;
  c.clients = clients;
  c.rounds = rounds;
  c.batch_size = batch_size;
  c.optimizer = optimizer;
  c.seed = seed;
  c.model = model_spec();
  c.cut_index = cut_index;
  c.sync_mode = sync_mode;
  c.wall_clock = wall_clock;
  c.server_delay_us = server_delay_us;
  return c;
}

EnsembleConfig ExperimentConfig::ensemble() const {
  EnsembleConfig c;
  c.base = split();
  c.models = ensemble_specs();
  return c;
}

namespace {

// Drops a trailing "; ..." or "# ..." comment.
std::string strip_comment(const std::string& value) {
  for (std::size_t i = 0; i < value.size(); ++i) {
    if ((value[i] == ';' || value[i] == '#') && (i == 0 || value[i - 1] == ' ' || value[i - 1] == '\t')) {
      return value.substr(0, i);
    }
  }
  return value;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig cfg;
  bool has_clients = false, has_mode = false;
  auto apply = [&](const std::string& key, const std::string& raw) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    it->second(cfg, key, trim(strip_comment(raw)));
    has_clients |= key == "clients";
    has_mode |= key == "mode";
  };
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(name, node.data());
      continue;
    }
    for (const auto& [sub, leaf] : node) apply(name + "." + sub, leaf.data());
  }
  validate(cfg, has_clients, has_mode);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace fedsplit
