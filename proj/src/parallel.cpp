#include "catwalk/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace catwalk
{
namespace
{
std::atomic<int> g_workers{0};

int default_workers()
{
    if (char const* env = std::getenv(kThreadsEnvVar); env && *env)
    {
        try
        {
            int const value = std::stoi(env);
            if (value >= 1)
            {
                return value;
            }
        }
        catch (std::exception const&)
        {
        }
    }
    unsigned const hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace

int worker_count()
{
    int const w = g_workers.load();
    return w > 0 ? w : default_workers();
}

void set_worker_count(int workers)
{
    g_workers.store(workers > 0 ? workers : 0);
}
}  // namespace catwalk
