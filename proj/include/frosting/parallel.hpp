#pragma once

#include <cstddef>
#include <functional>

namespace frosting {

// Worker count for data-parallel loops. Defaults to the hardware concurrency;
// the CLI overrides it from --threads / FROSTING_THREADS.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over disjoint chunks of [0, n), possibly on several
// threads. Callers own determinism: chunk results must be reduced in a fixed
// order after the call returns.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

// Convenience per-index form.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace frosting
