#pragma once

#include <cstddef>
#include <functional>

namespace spinshot {

// Worker count from SPINSHOT_THREADS (0 or unset: hardware concurrency).
int worker_count();

// Calls fn(chunk) for every chunk in [0, n_chunks) across worker_count()
// threads. Callers write results into per-chunk slots and reduce them in
// chunk order, which keeps outputs independent of the worker count.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

}  // namespace spinshot
