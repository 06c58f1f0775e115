#pragma once

#include <cstddef>
#include <functional>

namespace tomo {

/// Worker count: hardware concurrency, capped by TOMO_THREADS when set.
unsigned thread_count();

/// Calls body(i) for every i in [0, n). Iterations are split into contiguous
/// chunks across threads; the body must only write to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tomo
