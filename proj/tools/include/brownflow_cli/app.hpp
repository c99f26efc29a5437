// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "brownflow_cli/artifacts.hpp"
#include "brownflow_cli/experiments.hpp"

namespace brownflow::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitTestFailure = 1,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
};

// Manifest text for a finished run: config echo, version, file checksums
// and every report.
std::string manifest_json(const ExperimentConfig& config, const ArtifactSet& files,
                          const RunOutcome& outcome);

// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brownflow::cli
