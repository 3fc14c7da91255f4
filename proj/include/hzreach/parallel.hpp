#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

namespace hzreach::detail
{

/// Worker count for library kernels: HZREACH_THREADS if set and positive, else the OpenMP default.
int thread_count();

/// splitmix64 finalizer; derives independent stream seeds from (seed, index) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/**
 * Runs body(i) for i in [0, count) on the library's thread pool. The first exception thrown
 * by any iteration is rethrown on the calling thread after the loop finishes.
 */
template <typename Body> void parallel_for(long count, Body&& body)
{
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count()) if (count > 1)
    for (long i = 0; i < count; ++i)
    {
        try
        {
            body(i);
        }
        catch (...)
        {
            std::lock_guard<std::mutex> lock(guard);
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace hzreach::detail
