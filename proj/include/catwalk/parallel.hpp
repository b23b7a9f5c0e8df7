#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace catwalk
{
//! Environment variable selecting the worker count.
inline constexpr char const* kThreadsEnvVar = "CATWALK_THREADS";

//! Current worker count: set_worker_count, else CATWALK_THREADS, else
//! hardware concurrency.
int worker_count();
void set_worker_count(int workers);

/*!
 * Run fn(i) for i in [0, n) over worker_count() threads.
 *
 * Work is split into contiguous chunks; callers write results by index, so
 * output never depends on scheduling. The first exception thrown by any
 * worker is rethrown after all workers join.
 */
template<class F>
void parallel_for(std::int64_t n, F&& fn)
{
    int const workers
        = static_cast<int>(std::min<std::int64_t>(worker_count(), n));
    if (workers <= 1)
    {
        for (std::int64_t i = 0; i < n; ++i)
        {
            fn(i);
        }
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w)
    {
        std::int64_t const begin = n * w / workers;
        std::int64_t const end = n * (w + 1) / workers;
        threads.emplace_back([&, begin, end] {
            try
            {
                for (std::int64_t i = begin; i < end; ++i)
                {
                    fn(i);
                }
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads)
    {
        t.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}
}  // namespace catwalk
