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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits with
// the number of failures.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fedsplit/codec.h"
#include "fedsplit/ensemble_engine.h"
#include "fedsplit/experiment.h"
#include "fedsplit/fl_engine.h"
#include "fedsplit/gradcheck.h"
#include "fedsplit/loss.h"
#include "fedsplit/rng.h"
#include "fedsplit/split_engine.h"
#include "test_util.h"

namespace fedsplit {
namespace {

using testing::Cluster;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed sub-checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int g_failed = 0;

void report(int id, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = seconds_since(t0);
  const bool ok = c.failures.empty();
  g_failed += !ok;
  std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  for (const auto& f : c.failures) std::printf("    failed: %s\n", f.c_str());
  std::fflush(stdout);
}

// Per-frame-type byte totals seen on a set of coordinator endpoints.
struct FrameTally {
  std::mutex mu;
  std::map<FrameType, std::uint64_t> bytes;
  std::vector<std::uint64_t> activations_by_client;

  void attach(Cluster& cluster) {
    activations_by_client.assign(cluster.coord.size(), 0);
    for (std::size_t c = 0; c < cluster.coord.size(); ++c) {
      cluster.coord[c]->set_observer([this, c](Direction, const Frame& f) {
        std::lock_guard<std::mutex> lock(mu);
        const std::uint64_t n = frame_size(f.payload.size());
        bytes[f.type] += n;
        if (f.type == FrameType::kActivations) {
          // Smashed tensor plus frame header; the labels behind it are not
          // activation bytes.
          ByteReader r(f.payload);
          r.tensor();
          activations_by_client[c] += n - r.remaining();
        }
      });
    }
  }
  std::uint64_t of(FrameType t) const {
    auto it = bytes.find(t);
    return it == bytes.end() ? 0 : it->second;
  }
};

TrainResult run_fl_cluster(const FlConfig& cfg, const PreparedData& d, Cluster& cluster,
                           const RoundHook& hook = {}) {
  TrainResult out;
  cluster.run([&](std::size_t c, Endpoint& ep) { run_fl_client(cfg, c, d.shards[c], ep); },
              [&] { out = run_fl(cfg, d.test, cluster.coord_ptrs(), d.shard_sizes, hook); });
  return out;
}

TrainResult run_split_cluster(const SplitConfig& cfg, const Dataset& test,
                              const std::vector<Dataset>& shards, Cluster& cluster,
                              const RoundHook& hook = {}) {
  std::vector<std::size_t> sizes;
  for (const auto& s : shards) sizes.push_back(s.size());
  TrainResult out;
  cluster.run([&](std::size_t c, Endpoint& ep) { run_split_client(cfg, c, shards[c], ep); },
              [&] { out = run_split(cfg, test, cluster.coord_ptrs(), sizes, hook); });
  return out;
}

ExperimentConfig base_config(Mode mode, std::size_t clients, std::size_t rounds) {
  ExperimentConfig c;
  c.mode = mode;
  c.clients = clients;
  c.rounds = rounds;
  c.wall_clock = false;
  return c;
}

// ---------------------------------------------------------------- 1

void gradient_correctness(Check& c) {
  std::vector<ModelSpec> specs;
  for (std::size_t depth : {4u, 5u}) {
    ConvProfile p;
    p.conv_depth = depth;
    p.channels = 3;
    p.hidden = 6;
    p.classes = 4;
    p.input_shape = {2, 16};
    specs.push_back(build_conv1d_classifier(p));
  }
  {
    ConvProfile p;
    p.conv_depth = 4;
    p.channels = 2;
    p.kernel = 5;
    p.pool_every = 0;
    p.hidden = 5;
    p.classes = 3;
    p.input_shape = {1, 12};
    specs.push_back(build_conv1d_classifier(p));
  }
  {
    ModelSpec s;  // strided, padded conv and two dense layers
    s.input_shape = {2, 11};
    s.classes = 3;
    s.layers = {LayerSpec::conv1d(2, 3, 3, 2, 1), LayerSpec::relu(), LayerSpec::maxpool1d(2),
                LayerSpec::flatten(), LayerSpec::dense(9, 4), LayerSpec::relu(),
                LayerSpec::dense(4, 3)};
    specs.push_back(s);
  }
  {
    ModelSpec s;  // dense only
    s.input_shape = {1, 7};
    s.classes = 2;
    s.layers = {LayerSpec::flatten(), LayerSpec::dense(7, 5), LayerSpec::relu(),
                LayerSpec::dense(5, 2)};
    specs.push_back(s);
  }
  double worst = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Model m = init_weights(specs[i], 100 + i);
    Shape in{3};
    in.insert(in.end(), specs[i].input_shape.begin(), specs[i].input_shape.end());
    Tensor x(in);
    Rng rng(200 + i);
    std::normal_distribution<float> normal;
    for (float& v : x.data()) v = normal(rng);
    std::vector<Label> y;
    for (std::size_t b = 0; b < 3; ++b) y.push_back(static_cast<Label>(b % specs[i].classes));
    const GradCheckReport r = gradient_check(m, x, y);
    worst = std::max(worst, r.max_rel_error);
    c.expect(r.max_rel_error < 1e-4, fmt("model %zu rel error %.3g", i, r.max_rel_error));
    c.expect(r.checked == count_params(specs[i]), fmt("model %zu checked %zu", i, r.checked));
  }
  c.note(fmt("%zu models, worst relative error %.3g (limit 1e-4)", specs.size(), worst));
}

// ---------------------------------------------------------------- 2

void split_oracle(Check& c) {
  SplitConfig cfg;
  cfg.clients = 1;
  cfg.rounds = 25;
  cfg.batch_size = 16;
  cfg.seed = 7;
  cfg.model = build_conv1d_classifier(ConvProfile{});
  cfg.wall_clock = false;
  const Dataset train = synth_sequences(64, 5, 64, 1.8, 3);
  const Dataset test = synth_sequences(50, 5, 64, 1.8, 4);

  Model mono = init_weights(cfg.model, cfg.seed);
  Optimizer opt = Optimizer::for_model(cfg.optimizer, mono);
  std::vector<std::vector<float>> oracle;
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    const auto order = epoch_order(cfg.seed, 0, 0, r, 0, train.size());
    for (std::size_t off = 0; off < order.size(); off += cfg.batch_size) {
      std::vector<std::size_t> idx(order.begin() + off,
                                   order.begin() + std::min(order.size(), off + cfg.batch_size));
      const Tensor logits = mono.forward(train.gather(idx));
      mono.backward(softmax_cross_entropy(logits, train.gather_labels(idx)).grad);
      opt.step(mono);
    }
    oracle.push_back(mono.flat_params());
  }
  Cluster cluster(1);
  std::vector<std::vector<float>> seen;
  run_split_cluster(cfg, test, {train}, cluster,
                    [&](std::size_t, const Model& m) { seen.push_back(m.flat_params()); });
  c.expect(opt.steps() == 100, fmt("oracle took %zu steps", opt.steps()));
  c.expect(seen.size() == oracle.size(), "round count");
  double worst = 0;
  for (std::size_t r = 0; r < std::min(seen.size(), oracle.size()); ++r) {
    worst = std::max(worst, max_abs_diff(std::span<const float>(seen[r]),
                                         std::span<const float>(oracle[r])));
  }
  c.expect(worst < 1e-5, fmt("max abs diff %.3g", worst));
  c.note(fmt("100 steps, max abs weight difference %.3g (limit 1e-5)", worst));
}

// ---------------------------------------------------------------- 3

void fedavg_oracle(Check& c) {
  const std::vector<float> w1{1}, w2{2}, w3{3};
  const float agg = fedavg_aggregate(std::vector<ClientUpdate>{{0, w1, 1}, {1, w2, 2}, {2, w3, 3}})[0];
  c.expect(agg == static_cast<float>(14.0 / 6.0), fmt("14/6 case gave %.9g", agg));
  const std::vector<float> a{0.5f, -2.0f}, b{1.5f, 4.0f};
  const auto ab = fedavg_aggregate(std::vector<ClientUpdate>{{0, a, 3}, {1, b, 1}});
  c.expect(ab == std::vector<float>{0.75f, -0.5f}, "{3,1} weighted mean");

  FlConfig cfg;
  cfg.clients = 1;
  cfg.rounds = 8;
  cfg.batch_size = 32;
  cfg.seed = 5;
  cfg.model = build_conv1d_classifier(ConvProfile{});
  cfg.wall_clock = false;
  PreparedData d;
  d.train = synth_sequences(150, 5, 64, 1.8, 8);
  d.test = synth_sequences(50, 5, 64, 1.8, 9);
  d.shards = {d.train};
  d.shard_sizes = {d.train.size()};

  Model central = init_weights(cfg.model, cfg.seed);
  std::vector<std::vector<float>> oracle;
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    Optimizer opt = Optimizer::for_model(cfg.optimizer, central);
    const auto order = epoch_order(cfg.seed, 0, 0, r, 0, d.train.size());
    for (std::size_t off = 0; off < order.size(); off += cfg.batch_size) {
      std::vector<std::size_t> idx(order.begin() + off,
                                   order.begin() + std::min(order.size(), off + cfg.batch_size));
      const Tensor logits = central.forward(d.train.gather(idx));
      central.backward(softmax_cross_entropy(logits, d.train.gather_labels(idx)).grad);
      opt.step(central);
    }
    oracle.push_back(central.flat_params());
  }
  Cluster cluster(1);
  std::vector<std::vector<float>> seen;
  run_fl_cluster(cfg, d, cluster, [&](std::size_t, const Model& m) { seen.push_back(m.flat_params()); });
  c.expect(seen.size() == oracle.size(), "round count");
  double worst = 0;
  for (std::size_t r = 0; r < std::min(seen.size(), oracle.size()); ++r) {
    const double diff =
        max_abs_diff(std::span<const float>(seen[r]), std::span<const float>(oracle[r]));
    worst = std::max(worst, diff);
    c.expect(diff < 1e-6, fmt("round %zu diff %.3g", r, diff));
  }
  c.note(fmt("%zu rounds, worst per-round max abs difference %.3g (limit 1e-6)", seen.size(), worst));
}

// ---------------------------------------------------------------- 4

void byte_exactness(Check& c) {
  for (Mode mode : {Mode::kFl, Mode::kSplit, Mode::kEnsemble}) {
    for (SyncMode sync : {SyncMode::kRelay, SyncMode::kNone}) {
      if (mode == Mode::kFl && sync == SyncMode::kNone) continue;
      ExperimentConfig cfg = base_config(mode, 3, 3);
      cfg.synth_samples = 400;
      cfg.scheme = PartitionScheme::kImbalanced;
      cfg.sync_mode = sync;
      if (mode == Mode::kEnsemble) cfg.ensemble_depths = {4, 5};
      const std::string name = to_string(mode) + (mode == Mode::kFl ? "" : "/" + to_string(sync));
      std::optional<ExperimentResult> loop;
      for (TransportKind t : {TransportKind::kLoopback, TransportKind::kTcp}) {
        cfg.transport = t;
        const ExperimentResult r = run_local(cfg);
        const char* tname = t == TransportKind::kTcp ? "tcp" : "loopback";
        const std::uint64_t live = r.live.tx + r.live.rx;
        c.expect(live == r.estimate.total(),
                 fmt("%s %s: live %llu vs estimate %llu", name.c_str(), tname,
                     (unsigned long long)live, (unsigned long long)r.estimate.total()));
        std::uint64_t rounds = 0;
        for (const auto& s : r.series) rounds += series_total(s).tx + series_total(s).rx;
        c.expect(rounds == r.estimate.rounds_total(), name + " " + tname + ": per-round sums");
        if (!loop) {
          loop = r;
          c.note(fmt("%-14s %llu bytes", name.c_str(), (unsigned long long)live));
        } else {
          c.expect(r.live == loop->live, name + ": tcp and loopback counters differ");
          c.expect(r.series == loop->series, name + ": tcp and loopback series differ");
        }
      }
    }
  }
}

// ---------------------------------------------------------------- 5

void fl_constancy_split_scaling(Check& c) {
  const auto t0 = Clock::now();
  std::optional<ByteCounts> fl_per_client;
  std::uint64_t act_ref = 0;
  for (std::size_t k = 2; k <= 5; ++k) {
    ExperimentConfig cfg = base_config(Mode::kFl, k, 20);
    const PreparedData d = prepare_data(cfg);
    {
      Cluster cluster(k);
      const TrainResult r = run_fl_cluster(cfg.fl(), d, cluster);
      for (const RoundMetrics& m : r.rounds) {
        for (const ByteCounts& b : m.per_client) {
          if (!fl_per_client) fl_per_client = b;
          c.expect(b == *fl_per_client, fmt("FL k=%zu round %zu per-client bytes differ", k, m.round));
        }
      }
      c.note(fmt("k=%zu FL per-client per-round %llu up / %llu down", k,
                 (unsigned long long)fl_per_client->rx, (unsigned long long)fl_per_client->tx));
    }
    cfg.mode = Mode::kSplit;
    const SplitConfig sc = cfg.split();
    Cluster cluster(k);
    FrameTally tally;
    tally.attach(cluster);
    run_split_cluster(sc, d.test, d.shards, cluster);
    const Shape smashed = smashed_shape(sc.model, sc.cut_index);
    const CommEstimate est = estimate_split_bytes(smashed, d.shard_sizes, sc.batch_size, sc.rounds,
                                                  client_param_count(sc.model, sc.cut_index),
                                                  sc.sync_mode);
    c.expect(tally.activations_by_client == est.client_activations,
             fmt("k=%zu live activations differ from estimate", k));
    // Continuous 1/k share plus slack for one sample and one batch header
    // per round.
    const double per_sample = 4.0 * shape_numel(smashed);
    const double per_batch = 5 + 4 + 4.0 * (smashed.size() + 1);
    const double n = static_cast<double>(d.train.size());
    const double ideal = sc.rounds * (n / k) * (per_sample + per_batch / sc.batch_size);
    const double slack = sc.rounds * (per_sample + per_batch);
    std::uint64_t lo = ~0ull, hi = 0;
    for (std::uint64_t a : tally.activations_by_client) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      c.expect(std::abs(static_cast<double>(a) - ideal) <= slack,
               fmt("k=%zu client activation bytes %llu vs %.0f +- %.0f", k,
                   (unsigned long long)a, ideal, slack));
    }
    if (k == 2) act_ref = lo;
    c.note(fmt("k=%zu split per-client activation bytes %llu..%llu, k*min/(2*min_k2) = %.4f", k,
               (unsigned long long)lo, (unsigned long long)hi,
               static_cast<double>(k * lo) / (2.0 * act_ref)));
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 600, fmt("runtime %.0f s over 10 min", secs));
}

// ---------------------------------------------------------------- 6

void split_depth_invariance(Check& c) {
  std::optional<std::uint64_t> cut_traffic, none_training;
  for (std::size_t cut = 1; cut <= 3; ++cut) {
    const ModelSpec spec = build_conv1d_classifier(ConvProfile{});
    c.expect(smashed_shape(spec, cut) == smashed_shape(spec, 1),
             fmt("cut %zu changes the smashed shape", cut));
    for (SyncMode sync : {SyncMode::kRelay, SyncMode::kNone}) {
      ExperimentConfig cfg = base_config(Mode::kSplit, 3, 3);
      cfg.synth_samples = 400;
      cfg.cut_index = cut;
      cfg.sync_mode = sync;
      const PreparedData d = prepare_data(cfg);
      Cluster cluster(3);
      FrameTally tally;
      tally.attach(cluster);
      run_split_cluster(cfg.split(), d.test, d.shards, cluster);
      const std::uint64_t traffic = tally.of(FrameType::kActivations) + tally.of(FrameType::kGradients);
      if (!cut_traffic) cut_traffic = traffic;
      c.expect(traffic == *cut_traffic, fmt("cut %zu %s: cut-layer bytes %llu", cut,
                                            to_string(sync).c_str(), (unsigned long long)traffic));
      std::uint64_t all = 0;
      for (const auto& [t, n] : tally.bytes) all += n;
      if (sync == SyncMode::kNone) {
        const std::uint64_t training = all - tally.of(FrameType::kMetrics);
        if (!none_training) none_training = training;
        c.expect(training == *none_training, fmt("cut %zu none: training bytes", cut));
      }
      c.note(fmt("cut %zu %-5s cut-layer %llu, handoff %llu, evaluation upload %llu", cut,
                 to_string(sync).c_str(), (unsigned long long)traffic,
                 (unsigned long long)(tally.of(FrameType::kClientWeights) +
                                      tally.of(FrameType::kTokenPass)),
                 (unsigned long long)tally.of(FrameType::kMetrics)));
    }
  }
}

// ---------------------------------------------------------------- 7

void model_depth_scaling(Check& c) {
  std::size_t prev_params = 0;
  std::uint64_t prev_fl = 0;
  std::optional<std::uint64_t> split_total;
  for (std::size_t depth = 4; depth <= 8; ++depth) {
    ExperimentConfig cfg = base_config(Mode::kFl, 3, 2);
    cfg.synth_samples = 300;
    cfg.model.conv_depth = depth;
    const std::size_t params = count_params(cfg.model_spec());
    const ExperimentResult fl = run_local(cfg);
    const std::uint64_t fl_bytes = fl.live.tx + fl.live.rx;
    c.expect(params > prev_params && fl_bytes > prev_fl,
             fmt("depth %zu: params %zu, FL bytes %llu not increasing", depth, params,
                 (unsigned long long)fl_bytes));
    cfg.mode = Mode::kSplit;
    const ExperimentResult sp = run_local(cfg);
    const std::uint64_t sp_bytes = sp.live.tx + sp.live.rx;
    if (!split_total) split_total = sp_bytes;
    c.expect(sp_bytes == *split_total, fmt("depth %zu: split bytes %llu", depth,
                                           (unsigned long long)sp_bytes));
    c.note(fmt("depth %zu: params %zu, FL %llu bytes, split %llu bytes", depth, params,
               (unsigned long long)fl_bytes, (unsigned long long)sp_bytes));
    prev_params = params;
    prev_fl = fl_bytes;
  }
}

// ---------------------------------------------------------------- 8

void magnitude_gap(Check& c) {
  ExperimentConfig cfg = base_config(Mode::kSplit, 5, 100);
  cfg.model.channels = 32;
  cfg.model.hidden = 60;
  cfg.model.input_shape = {1, 124};
  const ModelSpec spec = cfg.model_spec();
  const std::size_t params = count_params(spec);
  const std::size_t samples = 13000;
  std::vector<std::size_t> shards(5, samples / 5);
  const CommEstimate fl = estimate_fl_bytes(params, cfg.rounds, 5);
  const CommEstimate sp =
      estimate_split_bytes(smashed_shape(spec, cfg.cut_index), shards, cfg.batch_size, cfg.rounds,
                           client_param_count(spec, cfg.cut_index), cfg.sync_mode);
  const double ratio = static_cast<double>(sp.total()) / static_cast<double>(fl.total());
  c.expect(params > 68000 && params < 70000, fmt("profile has %zu params", params));
  c.expect(ratio >= 10, fmt("ratio %.2f", ratio));
  c.note(fmt("%zu params, %zu samples: FL %.1f MB, split %.2f GB, ratio %.1f", params, samples,
             fl.total() / 1e6, sp.total() / 1e9, ratio));
}

// ---------------------------------------------------------------- 9

struct Curve {
  std::vector<double> acc;
  std::optional<std::size_t> first_reach(double level) const {
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] >= level) return i + 1;
    }
    return std::nullopt;
  }
  double max() const { return *std::max_element(acc.begin(), acc.end()); }
};

Curve learn(Mode mode, PartitionScheme scheme, std::uint64_t seed) {
  ExperimentConfig cfg = base_config(mode, 5, 50);
  cfg.seed = seed;
  cfg.scheme = scheme;
  cfg.sigma = 0.5;
  cfg.classes_per_client = 1;
  cfg.sync_mode = SyncMode::kRelay;
  cfg.batch_size = 32;
  const ExperimentResult r = run_local(cfg);
  Curve out;
  for (const RoundMetrics& m : r.series[0]) out.acc.push_back(m.accuracy);
  return out;
}

std::string rounds_str(const std::optional<std::size_t>& r) {
  return r ? std::to_string(*r) : std::string("-");
}

void learning_behavior(Check& c) {
  const auto t0 = Clock::now();
  {
    // Learnability of the default synthetic task: nearest noiseless template.
    const ExperimentConfig cfg = base_config(Mode::kFl, 5, 50);
    const PreparedData d = prepare_data(cfg);
    const std::size_t len = cfg.model.input_shape[1];
    std::size_t hit = 0;
    for (std::size_t i = 0; i < d.test.size(); ++i) {
      const float* x = d.test.samples.raw() + i * len;
      double best = 1e300;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < cfg.model.classes; ++k) {
        const auto t = synth_template(k, cfg.model.classes, len);
        double dist = 0;
        for (std::size_t j = 0; j < len; ++j) dist += (x[j] - t[j]) * (x[j] - t[j]);
        if (dist < best) best = dist, arg = k;
      }
      hit += arg == d.test.labels[i];
    }
    const double bayes = static_cast<double>(hit) / d.test.size();
    c.note(fmt("noise_std %.2f: nearest-template test accuracy %.3f", cfg.noise_std, bayes));
    c.expect(bayes > 0.92 && bayes < 0.98, fmt("task learnability %.3f is not about 95%%", bayes));
  }
  int a_ok = 0, b_ok = 0, c_ok = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Curve fl_iid = learn(Mode::kFl, PartitionScheme::kIid, seed);
    const Curve sp_iid = learn(Mode::kSplit, PartitionScheme::kIid, seed);
    const auto fi = fl_iid.first_reach(0.85), si = sp_iid.first_reach(0.85);
    const bool a = fi && si && *si < *fi;
    const Curve fl_imb = learn(Mode::kFl, PartitionScheme::kImbalanced, seed);
    const Curve sp_imb = learn(Mode::kSplit, PartitionScheme::kImbalanced, seed);
    const auto fb = fl_imb.first_reach(0.85), sb = sp_imb.first_reach(0.85);
    const bool b = sb && (!fb || *sb < *fb);
    const Curve fl_non = learn(Mode::kFl, PartitionScheme::kNonIid, seed);
    const Curve sp_non = learn(Mode::kSplit, PartitionScheme::kNonIid, seed);
    const bool cc = sp_non.max() < 0.35 && fl_non.acc.back() > 0.45;
    a_ok += a, b_ok += b, c_ok += cc;
    c.note(fmt("seed %llu: iid first>=85%% fl %s split %s [%s]; imbalanced fl %s split %s [%s]; "
               "non-iid split max %.3f, fl final %.3f [%s]",
               (unsigned long long)seed, rounds_str(fi).c_str(), rounds_str(si).c_str(),
               a ? "ok" : "x", rounds_str(fb).c_str(), rounds_str(sb).c_str(), b ? "ok" : "x",
               sp_non.max(), fl_non.acc.back(), cc ? "ok" : "x"));
  }
  c.note(fmt("seeds passing: (a) %d/5, (b) %d/5, (c) %d/5", a_ok, b_ok, c_ok));
  c.expect(a_ok >= 4, fmt("clause a holds in %d/5 seeds", a_ok));
  c.expect(b_ok >= 4, fmt("clause b holds in %d/5 seeds", b_ok));
  c.expect(c_ok >= 4, fmt("clause c holds in %d/5 seeds", c_ok));
  const double secs = seconds_since(t0);
  c.expect(secs < 1800, fmt("runtime %.0f s over 30 min", secs));
}

// ---------------------------------------------------------------- 10

void ensemble_properties(Check& c) {
  for (auto [m, k] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}, {2, 2}, {2, 5}}) {
    const RotationTable t = ensemble_schedule(m, k);
    std::vector<std::set<std::size_t>> visited(m);
    bool injective = t.size() == k;
    for (const auto& phase : t) {
      injective &= phase.size() == m && std::set<std::size_t>(phase.begin(), phase.end()).size() == m;
      for (std::size_t j = 0; j < m && j < phase.size(); ++j) visited[j].insert(phase[j]);
    }
    bool covered = true;
    for (const auto& v : visited) covered &= v.size() == k;
    c.expect(injective && covered, fmt("schedule (%zu,%zu)", m, k));
  }

  ExperimentConfig cfg = base_config(Mode::kEnsemble, 2, 3);
  cfg.synth_samples = 400;
  cfg.ensemble_depths = {4, 5};
  const PreparedData d = prepare_data(cfg);
  const EnsembleConfig ec = cfg.ensemble();
  std::vector<std::vector<std::vector<float>>> ens(2);
  EnsembleResult er;
  {
    Cluster cluster(2);
    cluster.run([&](std::size_t cl, Endpoint& ep) { run_ensemble_client(ec, cl, d.shards[cl], ep); },
                [&] {
                  er = run_ensemble(ec, d.test, cluster.coord_ptrs(), d.shard_sizes,
                                    [&](std::size_t m, std::size_t, const Model& w) {
                                      ens[m].push_back(w.flat_params());
                                    });
                });
  }
  for (std::size_t m = 0; m < 2; ++m) {
    Cluster cluster(2);
    std::vector<std::vector<float>> solo;
    const TrainResult alone = run_split_cluster(
        ec.member(m), d.test, d.shards, cluster,
        [&](std::size_t, const Model& w) { solo.push_back(w.flat_params()); });
    double worst = 0;
    c.expect(solo.size() == ens[m].size(), fmt("model %zu round count", m));
    for (std::size_t r = 0; r < std::min(solo.size(), ens[m].size()); ++r) {
      worst = std::max(worst, max_abs_diff(std::span<const float>(solo[r]),
                                           std::span<const float>(ens[m][r])));
    }
    c.expect(worst < 1e-5, fmt("model %zu isolation diff %.3g", m, worst));
    const ByteCounts a = series_total(er.models[m].rounds), b = series_total(alone.rounds);
    c.expect(a == b, fmt("model %zu bytes %llu vs solo %llu", m, (unsigned long long)(a.tx + a.rx),
                         (unsigned long long)(b.tx + b.rx)));
    c.note(fmt("model %zu: max abs diff vs solo %.3g, bytes %llu (solo %llu)", m, worst,
               (unsigned long long)(a.tx + a.rx), (unsigned long long)(b.tx + b.rx)));
  }
}

// ---------------------------------------------------------------- 11

void determinism(Check& c) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("fedsplit_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  };
  for (Mode mode : {Mode::kFl, Mode::kSplit, Mode::kEnsemble}) {
    ExperimentConfig cfg = base_config(mode, 3, 3);
    cfg.synth_samples = 400;
    cfg.scheme = PartitionScheme::kNonIid;
    cfg.classes_per_client = 2;
    if (mode == Mode::kEnsemble) cfg.ensemble_depths = {4, 6};
    std::vector<std::vector<std::string>> files;
    for (int run = 0; run < 2; ++run) {
      cfg.output = (dir / (to_string(mode) + std::to_string(run))).string();
      std::vector<std::string> contents;
      for (const auto& p : write_metrics(cfg, run_local(cfg))) contents.push_back(slurp(p));
      files.push_back(contents);
    }
    c.expect(!files[0].empty() && files[0] == files[1], to_string(mode) + " metrics differ");
    c.note(fmt("%-8s %zu files identical across runs", to_string(mode).c_str(), files[0].size()));
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace fedsplit

int main() {
  using namespace fedsplit;
  report(1, "gradient check on random small models", gradient_correctness);
  report(2, "k=1 split learning equals monolithic training", split_oracle);
  report(3, "k=1 FedAvg equals centralized training; weighted mean fixtures", fedavg_oracle);
  report(4, "live byte counters equal the estimator; loopback equals TCP", byte_exactness);
  report(5, "FL per-client bytes constant in k; split activation bytes scale as 1/k",
         fl_constancy_split_scaling);
  report(6, "split bytes independent of cut depth at fixed smashed shape", split_depth_invariance);
  report(7, "FL bytes grow with model depth; split bytes constant", model_depth_scaling);
  report(8, "split total at least 10x FL total for a 69k-parameter profile", magnitude_gap);
  report(9, "learning behavior on the synthetic task", learning_behavior);
  report(10, "ensemble schedule, isolation and per-model bytes", ensemble_properties);
  report(11, "repeated runs write byte-identical metrics", determinism);
  std::printf("%d of 11 criteria failed\n", g_failed);
  return g_failed;
}
