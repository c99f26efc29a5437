// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace brownflow::cli {

enum class Experiment {
  flow_pm,
  flow_plus_kernel,
  flow_plus_coalescing,
  wedge_laplace,
  chaos_compare,
  verify_suite,
};

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

// Validated configuration with every default written out. `params`
// holds all keys except `experiment` and `output_dir`, including seed.
struct ExperimentConfig {
  Experiment experiment = Experiment::flow_pm;
  std::string output_dir;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();

  std::uint64_t seed() const { return params.at("seed").get<std::uint64_t>(); }
  double real(const char* key) const { return params.at(key).get<double>(); }
  std::uint64_t count(const char* key) const { return params.at(key).get<std::uint64_t>(); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct Validation {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return config.has_value(); }
};

Validation validate(std::string_view text);

// YAML text that validates back to the same config.
std::string echo(const ExperimentConfig& config);

// Levenshtein distance, used for key suggestions.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace brownflow::cli
