#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace ew::par {

/// Whether the component-map kernels run under OpenMP. Defaults to true when
/// OpenMP is compiled in and more than one thread is available; EWCHECK_THREADS=1
/// or set_parallel(false) forces the serial reference path. The two paths are
/// bit-identical: every loop body writes one preassigned slot.
bool parallel_enabled();
void set_parallel(bool on);
int worker_count();

namespace detail {
void run_parallel(size_t n, const std::function<void(size_t)>& body);
}

/// Map `body` over [0, n). Exceptions thrown by any iteration are captured
/// and the first one is rethrown after the loop joins.
template <typename F>
void for_index(size_t n, F&& body) {
    if (!parallel_enabled() || n < 2) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    detail::run_parallel(n, std::function<void(size_t)>(std::forward<F>(body)));
}

}  // namespace ew::par
