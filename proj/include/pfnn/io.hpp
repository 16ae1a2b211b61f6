#ifndef PFNN_IO_HPP
#define PFNN_IO_HPP

#include <functional>
#include <string>

namespace pfnn {

// Shortest decimal form that round-trips a double (printf %.17g).
std::string format_double(double v);

// Writes content to path via a temporary file in the same directory
// followed by an atomic rename.
void atomic_write_file(const std::string& path, const std::string& content);

// Worker count from PFNN_THREADS (>= 1); falls back to 1 when unset.
int env_thread_count();

namespace detail {

// Runs fn(i) for i in [0, n) on `threads` workers, contiguous chunks.
// Each index is processed exactly once, so writes to disjoint slots are
// deterministic regardless of the worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace detail
}  // namespace pfnn

#endif
