// parallel.hpp
// Index-parallel loop with a deterministic result layout. Thread count is
// capped by the RANK1LAB_THREADS environment variable.
#pragma once

#include <cstddef>
#include <functional>

namespace rank1lab {

// Effective worker count: min(hardware, RANK1LAB_THREADS when set).
int effective_threads();

// Runs fn(i) for i in [0, n); each index is independent, so chunking over
// threads never changes results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rank1lab
