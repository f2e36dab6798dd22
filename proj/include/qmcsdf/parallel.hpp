#pragma once

#include <cstddef>
#include <functional>

namespace qmcsdf {

/// Number of workers used by parallel kernels. Defaults to the hardware
/// concurrency; outputs never depend on this value.
int worker_count();
void set_worker_count(int workers);

/// Splits [0, n) into contiguous chunks and calls body(begin, end) for each,
/// one chunk per worker. Bodies must write to disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace qmcsdf
