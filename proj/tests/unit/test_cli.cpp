// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include <brownflow/version.hpp>
#include <brownflow_cli/app.hpp>
#include <brownflow_cli/config.hpp>

namespace fs = std::filesystem;
namespace cli = brownflow::cli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("brownflow_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.yaml";
  std::ofstream(p) << text;
  return p;
}

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "brownflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string joined(const cli::Validation& v) {
  std::string s;
  for (const auto& e : v.errors) s += e + "\n";
  return s;
}

const char* kSmallPm =
    "experiment: flow_pm\n"
    "seed: 5\n"
    "x0: [-0.5, 0.0, 0.5]\n"
    "horizon: 0.1\n"
    "replicas: 40\n"
    "paths_written: 2\n";

}  // namespace

TEST(Config, DefaultsAreFilledIn) {
  const cli::Validation v = cli::validate("experiment: flow_pm\nseed: 3\nx0: [0.0]\nhorizon: 2\n");
  ASSERT_TRUE(v.ok()) << joined(v);
  EXPECT_DOUBLE_EQ(v.config->real("dt"), 2e-3);
  EXPECT_EQ(v.config->count("replicas"), 10000u);
  EXPECT_EQ(v.config->seed(), 3u);
  EXPECT_EQ(v.config->output_dir, "out/flow_pm");
}

TEST(Config, UnknownKeyGetsSuggestion) {
  const cli::Validation v = cli::validate("experiment: flow_pm\nseed: 3\nx0: [0.0]\ndts: 0.1\n");
  EXPECT_FALSE(v.ok());
  EXPECT_NE(joined(v).find("unknown key 'dts' (did you mean 'dt'?)"), std::string::npos)
      << joined(v);
}

TEST(Config, MissingSeedAndExperiment) {
  EXPECT_NE(joined(cli::validate("experiment: flow_pm\nx0: [0.0]\n")).find("missing required key 'seed'"),
            std::string::npos);
  EXPECT_NE(joined(cli::validate("seed: 1\n")).find("missing required key 'experiment'"),
            std::string::npos);
  EXPECT_NE(joined(cli::validate("experiment: flow_p\nseed: 1\n")).find("did you mean 'flow_pm'"),
            std::string::npos);
}

TEST(Config, ExitAlphaMustBeBelowEps) {
  const cli::Validation v = cli::validate(
      "experiment: wedge_laplace\nseed: 1\nexit: [{alpha: 0.3, eps: 0.2}]\n");
  EXPECT_FALSE(v.ok());
  EXPECT_NE(joined(v).find("alpha must be smaller than eps"), std::string::npos) << joined(v);
}

TEST(Config, CrossChecks) {
  EXPECT_FALSE(cli::validate("experiment: flow_pm\nseed: 1\nx0: [1.0, 0.0]\n").ok());
  EXPECT_FALSE(cli::validate("experiment: flow_pm\nseed: 1\nx0: [0.0]\nhorizon: 1\ndt: 2\n").ok());
  EXPECT_FALSE(cli::validate(
                   "experiment: flow_pm\nseed: 1\nx0: [0.0]\nreplicas: 3\npaths_written: 4\n")
                   .ok());
  EXPECT_FALSE(cli::validate("experiment: wedge_laplace\nseed: 1\nx0: 0.2\n").ok());
  EXPECT_FALSE(cli::validate("experiment: flow_pm\nseed: -1\nx0: [0.0]\n").ok());
  EXPECT_FALSE(cli::validate("[not, a, map]").ok());
  EXPECT_FALSE(cli::validate("experiment: flow_pm\nseed: [1\n").ok());
}

TEST(Config, EchoRoundTripsEveryShippedConfig) {
  for (const auto& entry : fs::directory_iterator(BROWNFLOW_SOURCE_DIR "/configs")) {
    const cli::Validation v = cli::validate(slurp(entry.path()));
    ASSERT_TRUE(v.ok()) << entry.path() << "\n" << joined(v);
    const cli::Validation again = cli::validate(cli::echo(*v.config));
    ASSERT_TRUE(again.ok()) << joined(again);
    EXPECT_EQ(*again.config, *v.config) << entry.path();
    EXPECT_EQ(cli::echo(*again.config), cli::echo(*v.config));
  }
}

TEST(Config, EditDistance) {
  EXPECT_EQ(cli::edit_distance("dt", "dts"), 1u);
  EXPECT_EQ(cli::edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(cli::edit_distance("", "abc"), 3u);
}

TEST(Artifacts, Crc32CheckValue) {
  EXPECT_EQ(cli::crc32_of("123456789"), 0xCBF43926u);
  EXPECT_EQ(cli::crc32_of(""), 0u);
}

TEST(Cli, VersionAndUsage) {
  const Invocation v = invoke({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(brownflow::kVersion), std::string::npos);
  EXPECT_EQ(invoke({}).code, cli::kExitConfigError);
  EXPECT_EQ(invoke({"run"}).code, cli::kExitConfigError);
  EXPECT_EQ(invoke({"run", "x.yaml", "--threads", "0"}).code, cli::kExitConfigError);
}

TEST(Cli, ValidatePrintsEcho) {
  const fs::path dir = scratch("validate");
  const fs::path cfg = write_config(dir, kSmallPm);
  const Invocation r = invoke({"validate", cfg.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, cli::echo(*cli::validate(kSmallPm).config));
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path dir = scratch("bad");
  const fs::path cfg = write_config(dir, "experiment: flow_pm\nx0: [0.0]\n");
  const Invocation r = invoke({"run", cfg.string()});
  EXPECT_EQ(r.code, cli::kExitConfigError);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  EXPECT_EQ(invoke({"run", (dir / "missing.yaml").string()}).code, cli::kExitConfigError);
}

TEST(Cli, UnwritableOutputExitsThree) {
  const fs::path dir = scratch("unwritable");
  const fs::path cfg = write_config(dir, kSmallPm);
  std::ofstream(dir / "blocker") << "x";
  const Invocation r = invoke({"run", cfg.string(), "--output-dir", (dir / "blocker" / "out").string()});
  EXPECT_EQ(r.code, cli::kExitRuntimeError) << r.err;
}

TEST(Cli, RunsAreDeterministicAcrossThreadCounts) {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_config(dir, kSmallPm);
  const fs::path a = dir / "a", b = dir / "b";
  ASSERT_EQ(invoke({"run", cfg.string(), "--output-dir", a.string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(invoke({"run", cfg.string(), "--output-dir", b.string(), "--threads", "3"}).code, 0);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  ASSERT_GE(manifest["files"].size(), 5u);
  for (const auto& f : manifest["files"]) {
    const std::string name = f["name"];
    const std::string bytes = slurp(a / name);
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", cli::crc32_of(bytes));
    EXPECT_EQ(f["crc32"], crc) << name;
    EXPECT_EQ(f["bytes"], bytes.size()) << name;
    if (name != "config.yaml") EXPECT_EQ(bytes, slurp(b / name)) << name;
  }
  EXPECT_TRUE(fs::exists(a / "trajectory_0001.csv"));
  EXPECT_FALSE(fs::exists(a / "trajectory_0002.csv"));
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos) << e.path();
  }

  const fs::path c = dir / "c";
  ASSERT_EQ(invoke({"run", cfg.string(), "--output-dir", c.string(), "--seed-override", "6"}).code,
            0);
  EXPECT_NE(slurp(a / "terminal.csv"), slurp(c / "terminal.csv"));
  EXPECT_EQ(nlohmann::json::parse(slurp(c / "manifest.json"))["config"]["seed"], 6);
}

TEST(Cli, FailingReportExitsOne) {
  const fs::path dir = scratch("failing");
  // an exit pair far below the step scale cannot reach alpha / eps
  const fs::path cfg = write_config(
      dir,
      "experiment: wedge_laplace\nseed: 1\ndt: 0.01\neps: 0.01\nreplicas: 60\n"
      "exit: [{alpha: 0.001, eps: 0.002}]\nexit_replicas: 400\n");
  const Invocation r = invoke({"run", cfg.string(), "--output-dir", (dir / "o").string()});
  EXPECT_EQ(r.code, cli::kExitTestFailure) << r.out << r.err;
  EXPECT_NE(r.err.find("FAIL "), std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
  EXPECT_FALSE(manifest["pass"].get<bool>());
}
