// SPDX-License-Identifier: Apache-2.0
#include "brownflow_cli/app.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <brownflow/parallel.hpp>
#include <brownflow/version.hpp>

namespace brownflow::cli {

using Json = nlohmann::ordered_json;

std::string manifest_json(const ExperimentConfig& config, const ArtifactSet& files,
                          const RunOutcome& outcome) {
  Json m = Json::object();
  m["tool"] = "brownflow";
  m["version"] = kVersion;
  m["experiment"] = to_string(config.experiment);
  m["config_echo"] = echo(config);
  Json cfg = Json::object();
  cfg["experiment"] = to_string(config.experiment);
  cfg["output_dir"] = config.output_dir;
  for (const auto& [k, v] : config.params.items()) cfg[k] = v;
  m["config"] = cfg;
  m["pass"] = outcome.pass;
  Json list = Json::array();
  for (const auto& f : files.entries()) {
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", f.crc32);
    Json e = Json::object();
    e["name"] = f.name;
    e["bytes"] = f.bytes;
    e["crc32"] = crc;
    list.push_back(e);
  }
  m["files"] = list;
  Json reports = Json::array();
  for (const auto& r : outcome.reports) reports.push_back(Json::parse(to_json_line(r)));
  m["reports"] = reports;
  return m.dump(2) + "\n";
}

namespace {

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return static_cast<bool>(in) || in.eof();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo experiments for Brownian stochastic flows", "brownflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed_override = 0;
  std::size_t threads = 0;

  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Path to the YAML config")->required();
  CLI::Option* dir_opt = run->add_option("--output-dir", output_dir, "Output directory");
  CLI::Option* seed_opt = run->add_option("--seed-override", seed_override, "Replace the seed");
  CLI::Option* thr_opt =
      run->add_option("--threads", threads, "Worker threads (default $BROWNFLOW_THREADS)")
          ->check(CLI::PositiveNumber);

  std::string check_path;
  CLI::App* check = app.add_subcommand("validate", "Print the normalized config");
  check->add_option("config", check_path, "Path to the YAML config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  const std::string& path = run->parsed() ? config_path : check_path;
  std::string text;
  if (!read_file(path, text)) {
    err << "brownflow: cannot read config '" << path << "'\n";
    return kExitConfigError;
  }
  Validation v = validate(text);
  if (!v.ok()) {
    for (const auto& e : v.errors) err << "config error: " << e << "\n";
    return kExitConfigError;
  }
  ExperimentConfig cfg = *v.config;
  if (check->parsed()) {
    out << echo(cfg);
    return kExitPass;
  }
  if (*seed_opt) cfg.params["seed"] = seed_override;
  if (*dir_opt) cfg.output_dir = output_dir;
  if (!*thr_opt) threads = default_threads();

  try {
    ArtifactSet files(cfg.output_dir);
    files.write("config.yaml", echo(cfg));
    const RunOutcome outcome = run_experiment(cfg, threads, files);
    write_atomic(files.dir(), "manifest.json", manifest_json(cfg, files, outcome));
    std::size_t failed = 0;
    for (const auto& r : outcome.reports) {
      if (!r.pass) {
        ++failed;
        err << "FAIL " << to_json_line(r) << "\n";
      }
    }
    out << to_string(cfg.experiment) << ": " << files.entries().size() << " files in "
        << files.dir().string() << ", " << outcome.reports.size() << " reports, " << failed
        << " failed\n";
    return outcome.pass ? kExitPass : kExitTestFailure;
  } catch (const std::exception& e) {
    err << "brownflow: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace brownflow::cli
