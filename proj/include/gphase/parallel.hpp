#pragma once

#include <cstddef>
#include <functional>

namespace gphase {

// Thread count used by parallel_for: the GPHASE_THREADS environment variable
// if set and positive, otherwise std::thread::hardware_concurrency().
std::size_t default_thread_count();

// Runs fn(0) .. fn(n-1), work-stealing over default_thread_count() threads.
// Falls back to a plain serial loop when only one thread is available.
// fn must be safe to call concurrently for distinct indices; exceptions
// thrown by fn are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gphase
