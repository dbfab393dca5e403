#pragma once

#include <cstddef>
#include <functional>

namespace pcn {

// Worker count used by the matrix kernels. 0 selects the hardware default.
void set_num_threads(int n);
int num_threads();

// Resolves --threads / PCN_THREADS: explicit > 0 wins, otherwise the env var,
// otherwise 0 (auto).
int resolve_thread_count(int requested);

// Runs body(begin, end) over a static partition of [0, n). Every index is
// visited exactly once; callers must make per-index work independent so
// results do not depend on the worker count.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace pcn
