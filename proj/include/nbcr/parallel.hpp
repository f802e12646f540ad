#ifndef NBCR_PARALLEL_HPP
#define NBCR_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace nbcr {

/// Worker count: `requested` when positive, else NB_REGION_THREADS when set to a
/// positive integer, else the hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

/// Runs body(i) for i in [0, count) on `threads` workers in contiguous blocks.
/// Callers write to per-index slots; no ordering between indices is implied.
void parallel_for(std::int64_t count, unsigned threads, const std::function<void(std::int64_t)>& body);

} // namespace nbcr

#endif // NBCR_PARALLEL_HPP
