#pragma once

#include <cstdint>
#include <functional>

namespace bsdelab {

// Number of workers used by parallel_blocks. Controlled by the
// BSDE_LAB_THREADS environment variable (0 or unset = hardware concurrency).
int worker_count();

// Runs fn(block_begin, block_end) over [0, n) split into fixed-size blocks.
// The block layout depends only on (n, block_size), never on the worker
// count, so per-block outputs are identical for any number of threads.
// Blocks must write to disjoint locations.
void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t)>& fn);

// Fixed block size used for regression accumulations; changing it changes
// results at the last bit, so it is a constant, not a knob.
inline constexpr std::int64_t kReductionBlock = 1024;

}  // namespace bsdelab
