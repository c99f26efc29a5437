// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include <brownflow/verify.hpp>
#include <json.hpp>

#include "brownflow_cli/artifacts.hpp"
#include "brownflow_cli/config.hpp"

namespace brownflow::cli {

struct RunOutcome {
  bool pass = true;
  std::vector<TestReport> reports;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
};

// Runs the experiment, writing its data files into `out`. Artifacts are
// independent of `threads`.
RunOutcome run_experiment(const ExperimentConfig& config, std::size_t threads, ArtifactSet& out);

}  // namespace brownflow::cli
