#include "hzreach/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace hzreach::detail
{

int thread_count()
{
    static const int count = [] {
        if (const char* env = std::getenv("HZREACH_THREADS"))
        {
            try
            {
                const int n = std::stoi(env);
                if (n > 0)
                    return n;
            }
            catch (const std::exception&)
            {
            }
        }
        return omp_get_max_threads();
    }();
    return count;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace hzreach::detail
