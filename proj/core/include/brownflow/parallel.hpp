// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace brownflow {

// BROWNFLOW_THREADS if set and valid, else the hardware concurrency.
std::size_t default_threads();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 selects
// default_threads()). Work is claimed dynamically; callers write
// results by index so the outcome does not depend on scheduling. The
// exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace brownflow
