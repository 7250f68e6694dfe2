#ifndef MORLEY_PARALLEL_HPP
#define MORLEY_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace morley {

/// Worker count: MORLEY_THREADS if set (>= 1), else the hardware concurrency.
int worker_count();

/// Calls body(chunk, begin, end) over `num_chunks` contiguous chunks of
/// [0, n). Chunk boundaries depend only on n and num_chunks, so results
/// combined in chunk order are independent of scheduling.
void parallel_chunks(std::size_t n, int num_chunks,
                     const std::function<void(int, std::size_t, std::size_t)>& body);

}  // namespace morley

#endif
