#pragma once

#include <cstddef>
#include <functional>

namespace tracial {

/// Process-wide worker count used by Monte Carlo loops (default 1).
void set_worker_count(unsigned workers);
unsigned worker_count();

/// Calls body(i) for i in [0, count). Work is split into contiguous chunks,
/// one per worker; callers write into per-index slots and reduce afterwards
/// in index order, which keeps every result independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace tracial
