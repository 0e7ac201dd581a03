#include "warphopf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace warphopf
{
namespace
{
std::atomic< int > g_threads{1};
}

void set_thread_count(int threads)
{
    if (threads < 1)
        throw std::invalid_argument("thread count must be at least 1");
    g_threads = threads;
}

int thread_count()
{
    return g_threads;
}

void parallel_for(std::size_t count, const std::function< void(std::size_t, std::size_t) >& body)
{
    const auto workers = static_cast< std::size_t >(std::min< std::size_t >(g_threads, std::max< std::size_t >(count, 1)));
    if (workers <= 1)
    {
        body(0, count);
        return;
    }
    std::vector< std::exception_ptr > errors(workers);
    std::vector< std::thread >        pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        const std::size_t begin = w * chunk;
        const std::size_t end   = std::min(count, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try
            {
                if (begin < end)
                    body(begin, end);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}
} // namespace warphopf
