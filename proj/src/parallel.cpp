#include "ewcheck/parallel.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ew::par {

namespace {

std::atomic<int> g_mode{-1};  // -1 unset, 0 serial, 1 parallel

int default_mode() {
#ifdef _OPENMP
    if (const char* env = std::getenv("EWCHECK_THREADS")) {
        int n = std::atoi(env);
        if (n == 1) return 0;
        if (n > 1) omp_set_num_threads(n);
    }
    return omp_get_max_threads() > 1 ? 1 : 0;
#else
    return 0;
#endif
}

}  // namespace

bool parallel_enabled() {
    int m = g_mode.load(std::memory_order_relaxed);
    if (m < 0) {
        m = default_mode();
        g_mode.store(m, std::memory_order_relaxed);
    }
    return m == 1;
}

void set_parallel(bool on) { g_mode.store(on ? 1 : 0, std::memory_order_relaxed); }

int worker_count() {
#ifdef _OPENMP
    return parallel_enabled() ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

namespace detail {

void run_parallel(size_t n, const std::function<void(size_t)>& body) {
#ifdef _OPENMP
    std::exception_ptr first;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            body(static_cast<size_t>(i));
        } catch (...) {
            bool expected = false;
            if (failed.compare_exchange_strong(expected, true)) {
#pragma omp critical(ewcheck_par_error)
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
#else
    for (size_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace detail

}  // namespace ew::par
