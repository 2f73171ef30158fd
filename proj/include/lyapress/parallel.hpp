#ifndef LYAPRESS_PARALLEL_HPP
#define LYAPRESS_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lyapress {

// Effective worker count: explicit request, else LYAPRESS_THREADS, else
// hardware concurrency.
int resolve_thread_count(int requested = 0);

// Runs fn(block) for block = 0..num_blocks-1 on up to `threads` workers.
// Blocks are claimed through an atomic counter; the *partition into blocks*
// is fixed by the caller, so any computation whose per-block result does not
// depend on scheduling produces identical output for every thread count.
void parallel_blocks(std::size_t num_blocks, int threads,
                     const std::function<void(std::size_t)>& fn);

} // namespace lyapress

#endif
