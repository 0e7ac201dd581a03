#ifndef WARPHOPF_PARALLEL_HPP
#define WARPHOPF_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace warphopf
{
/// Number of worker threads used by node-local maps. Defaults to 1.
void set_thread_count(int threads);
int  thread_count();

/// Runs body(begin, end) over a static partition of [0, count). Each index is visited by
/// exactly one worker, so results never depend on the thread count.
void parallel_for(std::size_t count, const std::function< void(std::size_t, std::size_t) >& body);
} // namespace warphopf

#endif // WARPHOPF_PARALLEL_HPP
