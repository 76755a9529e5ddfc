#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace zetalab {

// Thread count comes from ZETALAB_THREADS (default 1). Results are always
// reduced in ascending index order so that reports are byte-identical no
// matter how the work was scheduled.
inline int thread_count() {
    if (const char* env = std::getenv("ZETALAB_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

// Evaluates f(i) for i in [0, n) and returns the values in index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
    std::vector<T> out(n);
    int threads = thread_count();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            out[i] = f(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

// Ordered sum of f(i) over [0, n); the summation order is fixed regardless of
// the thread count.
template <typename T, typename F>
T parallel_sum(std::size_t n, F&& f) {
    std::vector<T> vals = parallel_map<T>(n, std::forward<F>(f));
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += vals[i];
    return acc;
}

}  // namespace zetalab
