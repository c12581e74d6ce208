#include "twoq/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace twoq {

namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("TWOQ_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{default_threads()};
    return cap;
}

} // namespace

void set_worker_threads(unsigned n) { thread_cap().store(n == 0 ? 1 : n); }

unsigned worker_threads() { return thread_cap().load(); }

void parallel_for_each(std::size_t num_tasks, const std::function<void(std::size_t)>& fn) {
    const unsigned nthreads =
        static_cast<unsigned>(std::min<std::size_t>(worker_threads(), num_tasks));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < num_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= num_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace twoq
