#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace repomech {

// Index-parallel loop over [0, n). Work items must be independent and write
// only to their own output slot; results are then identical for any job
// count. jobs <= 1 runs inline.
template <class Fn>
void parallel_for(int64_t n, int jobs, Fn&& fn) {
    if (n <= 0) return;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (jobs > hw) jobs = hw;
    if (jobs <= 1 || n == 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (int64_t i = w; i < n; i += jobs) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace repomech
