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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fedsplit/config.h"
#include "fedsplit/metrics.h"
#include "json.hpp"

namespace fedsplit {
namespace {

namespace fs = std::filesystem;

TEST(ConfigTest, Defaults) {
  const ExperimentConfig c = parse_config("mode = fl\nclients = 3\n");
  EXPECT_EQ(c.mode, Mode::kFl);
  EXPECT_EQ(c.clients, 3u);
  EXPECT_EQ(c.rounds, 100u);
  EXPECT_EQ(c.local_epochs, 1u);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_FLOAT_EQ(c.optimizer.lr, 0.001f);
  EXPECT_EQ(c.sync_mode, SyncMode::kRelay);
  EXPECT_EQ(c.scheme, PartitionScheme::kIid);
  EXPECT_EQ(c.transport, TransportKind::kLoopback);
  EXPECT_EQ(c.cut_index, 2u);
}

TEST(ConfigTest, SectionsAndComments) {
  const ExperimentConfig c = parse_config(
      "; experiment\nmode = split  ; inline\nclients = 4 # count\nsync_mode = none\n"
      "[model]\nconv_depth = 6\ncut_index = 3\n[partition]\nscheme = imbalanced\nsigma = 0.25\n");
  EXPECT_EQ(c.mode, Mode::kSplit);
  EXPECT_EQ(c.sync_mode, SyncMode::kNone);
  EXPECT_EQ(c.model.conv_depth, 6u);
  EXPECT_EQ(c.cut_index, 3u);
  EXPECT_EQ(c.scheme, PartitionScheme::kImbalanced);
  EXPECT_DOUBLE_EQ(c.sigma, 0.25);
}

void expect_key_error(const std::string& text, const std::string& key) {
  try {
    parse_config(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), key) << e.what();
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos);
  }
}

TEST(ConfigTest, ErrorsNameTheKey) {
  expect_key_error("mode = fl\nclients = 2\nfoo = 1\n", "foo");
  expect_key_error("clients = 2\n", "mode");
  expect_key_error("mode = fl\n", "clients");
  expect_key_error("mode = fl\nclients = two\n", "clients");
  expect_key_error("mode = split\nclients = 2\nlocal_epochs = 5\n", "local_epochs");
  expect_key_error("mode = ensemble\nclients = 2\nlocal_epochs = 5\n", "local_epochs");
  expect_key_error("mode = fl\nclients = 2\n[model]\ncut_index = 99\n", "model.cut_index");
  expect_key_error("mode = fl\nclients = 2\n[partition]\nscheme = zipf\n", "partition.scheme");
}

// Runs the CLI binary and returns its exit status.
int cli(const std::string& args) {
  const std::string cmd = std::string(FEDSPLIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fedsplit_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Writes a small config and returns its path.
  std::string config(const std::string& name, const std::string& body) {
    const std::string out = (dir_ / name).string();
    const std::string path = out + ".ini";
    std::ofstream(path) << "output = " << out << "\nwall_clock = off\nrounds = 2\nseed = 3\n"
                        << body
                        << "\n[model]\nchannels = 4\nhidden = 16\ninput_length = 32\n"
                           "[dataset]\nn = 200\n";
    return path;
  }
  fs::path out(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli("run --config " + config("ok", "mode = fl\nclients = 2")), 0);
  EXPECT_TRUE(fs::exists(out("ok.csv")));
  EXPECT_TRUE(fs::exists(out("ok.json")));
  EXPECT_EQ(cli("run --config " + config("bad", "mode = fl\nclients = 2\nbogus = 1")), 1);
  EXPECT_EQ(cli("run --config " + (dir_ / "missing.ini").string()), 1);
  EXPECT_EQ(cli("run"), 1);
  EXPECT_EQ(cli("frobnicate --config x"), 1);
  // More shards than samples per class leaves a client empty.
  EXPECT_EQ(cli("run --config " + config("empty", "mode = fl\nclients = 150\n"
                                                   "[partition]\nscheme = noniid")),
            2);
}

TEST_F(CliTest, UnreachableCoordinatorFails) {
  const std::string cfg = config("tcp", "mode = fl\nclients = 2\n[transport]\nkind = tcp");
  EXPECT_EQ(cli("run --config " + cfg + " --role client --client-id 0 --connect 127.0.0.1:1"), 2);
  EXPECT_EQ(cli("run --config " + cfg + " --role client --client-id 5 --connect 127.0.0.1:1"), 1);
  EXPECT_EQ(cli("run --config " + cfg + " --role client"), 1);
}

TEST_F(CliTest, RunsAreByteIdentical) {
  for (const std::string mode : {"fl", "split"}) {
    const std::string body = "mode = " + mode + "\nclients = 3\n[partition]\nscheme = imbalanced";
    ASSERT_EQ(cli("run --config " + config(mode + "_a", body)), 0);
    ASSERT_EQ(cli("run --config " + config(mode + "_b", body)), 0);
    EXPECT_EQ(slurp(out(mode + "_a.csv")), slurp(out(mode + "_b.csv"))) << mode;
    EXPECT_EQ(slurp(out(mode + "_a.json")), slurp(out(mode + "_b.json"))) << mode;
  }
}

TEST_F(CliTest, PartitionWritesPlanAndStats) {
  ASSERT_EQ(cli("partition --config " +
                config("p", "mode = split\nclients = 4\n[partition]\nscheme = noniid")),
            0);
  const auto plan = nlohmann::json::parse(slurp(out("p.plan.json")));
  const auto stats = nlohmann::json::parse(slurp(out("p.stats.json")));
  EXPECT_FALSE(plan.empty());
  EXPECT_FALSE(stats.empty());
  // Replaying the saved plan gives the same run as partitioning afresh.
  const std::string base = "mode = split\nclients = 4";
  ASSERT_EQ(cli("run --config " + config("fresh", base + "\n[partition]\nscheme = noniid")), 0);
  ASSERT_EQ(cli("run --config " +
                config("replay", base + "\n[partition]\nplan_file = " + out("p.plan.json").string())),
            0);
  EXPECT_EQ(slurp(out("fresh.csv")), slurp(out("replay.csv")));
}

TEST_F(CliTest, EstimateMatchesLiveRun) {
  for (const std::string mode : {"fl", "split"}) {
    const std::string body = "mode = " + mode + "\nclients = 3\n[partition]\nscheme = imbalanced";
    const std::string cfg = config(mode, body);
    ASSERT_EQ(cli("estimate --config " + cfg), 0);
    ASSERT_EQ(cli("run --config " + cfg), 0);
    const auto est = nlohmann::json::parse(slurp(out(mode + ".estimate.json")))[mode];
    const auto series = parse_metrics_json(slurp(out(mode + ".json")));
    const ByteCounts live = series_total(series);
    const std::uint64_t control = est["control"]["total"];
    EXPECT_EQ(live.tx + live.rx + control, est["total"].get<std::uint64_t>()) << mode;
  }
}

TEST_F(CliTest, SeparateProcessesOverTcpMatchLoopback) {
  const std::string body = "mode = split\nclients = 2\n[partition]\nscheme = imbalanced";
  ASSERT_EQ(cli("run --config " + config("loop", body)), 0);
  const std::string cfg = config("tcp", body + "\n[transport]\nkind = tcp");
  const std::string addr = "127.0.0.1:" + std::to_string(20000 + ::getpid() % 20000);
  const std::string bin = FEDSPLIT_CLI;
  const std::string cmd = "(" + bin + " run --config " + cfg + " --role coordinator --listen " +
                          addr + " & " + bin + " run --config " + cfg +
                          " --role client --client-id 1 --retry-ms 5000 --connect " + addr +
                          " & " + bin + " run --config " + cfg +
                          " --role client --client-id 0 --retry-ms 5000 --connect " + addr +
                          " & wait) >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(out("loop.csv")), slurp(out("tcp.csv")));
}

}  // namespace
}  // namespace fedsplit
