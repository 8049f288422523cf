#ifndef QUOTER_DETAIL_PARALLEL_HPP
#define QUOTER_DETAIL_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace quoter::detail {

// Worker count: explicit request, else hardware concurrency, always capped by
// the QUOTER_THREADS environment variable when set.
inline int resolve_threads(int requested) {
    int n = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("QUOTER_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

// Block-partitioned parallel loop. fn(i) must only touch state owned by
// index i; results are therefore independent of the thread count.
template <typename Fn>
void parallel_for(long n, int n_threads, Fn&& fn) {
    int workers = resolve_threads(n_threads);
    if (n <= 0) return;
    if (workers == 1 || n == 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<int>(std::min<long>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        long lo = w * chunk;
        long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace quoter::detail

#endif  // QUOTER_DETAIL_PARALLEL_HPP
