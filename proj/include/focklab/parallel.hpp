#pragma once

#include <cstddef>
#include <functional>

namespace focklab {

/// Number of worker threads used by parallel_for. Defaults to 1.
void set_thread_count(unsigned k);
unsigned thread_count();

/// Runs body(begin, end) over [0, count) split into contiguous ranges.
/// Callers write results into per-index slots and reduce afterwards in a
/// fixed order, so results never depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace focklab
