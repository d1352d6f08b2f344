// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace morprec {

/// Runs fn(i) for i in [begin, end) on up to `threads` workers over contiguous
/// index chunks. Iterations must be independent; outputs written to disjoint
/// slots are deterministic regardless of the worker count. threads <= 1 runs
/// serially on the calling thread.
void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace morprec
