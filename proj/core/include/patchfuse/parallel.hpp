#pragma once

#include <cstddef>
#include <functional>

namespace patchfuse {

// 0 restores the hardware default.
void set_max_threads(int n);
int effective_threads();

// Runs fn(begin, end) over fixed-size chunks of [0, n), possibly on several
// threads. Chunk boundaries do not depend on the thread count.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Deterministic reduction: per-chunk partial sums combined by a fixed-shape
// pairwise tree, so the result is identical for any thread count.
double chunked_sum(std::size_t n, std::size_t chunk,
                   const std::function<double(std::size_t, std::size_t)>& fn);

}  // namespace patchfuse
