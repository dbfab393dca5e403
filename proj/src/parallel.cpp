#include "pcn/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#ifdef PCN_HAVE_OPENMP
#include <omp.h>
#endif

namespace pcn {

namespace {

int g_threads = 0;

int hardware_threads() {
#ifdef PCN_HAVE_OPENMP
    return std::max(1, omp_get_num_procs());
#else
    return std::max(1u, std::thread::hardware_concurrency());
#endif
}

}  // namespace

void set_num_threads(int n) { g_threads = std::max(0, n); }

int num_threads() {
#ifdef PCN_HAVE_OPENMP
    return g_threads > 0 ? g_threads : hardware_threads();
#else
    return 1;
#endif
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PCN_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return 0;
}

void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t chunk = std::max<std::size_t>(1, min_chunk);
    const std::size_t max_workers = (n + chunk - 1) / chunk;
    const int workers = static_cast<int>(
        std::min<std::size_t>(max_workers, static_cast<std::size_t>(num_threads())));
    if (workers <= 1) {
        body(0, n);
        return;
    }
#ifdef PCN_HAVE_OPENMP
#pragma omp parallel num_threads(workers)
    {
        const auto w = static_cast<std::size_t>(omp_get_thread_num());
        const auto count = static_cast<std::size_t>(omp_get_num_threads());
        const std::size_t begin = n * w / count;
        const std::size_t end = n * (w + 1) / count;
        if (begin < end) body(begin, end);
    }
#else
    body(0, n);
#endif
}

}  // namespace pcn
